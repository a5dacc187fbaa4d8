#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "smc/config.hpp"

namespace smc {

// one table per run: numeric columns, optional leading label column,
// plus ordered meta notes echoed into the output header
struct OutputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string label_column;             // empty when rows are purely numeric
    std::vector<std::string> row_labels;  // parallel to rows when label_column set
    std::vector<std::pair<std::string, std::string>> meta;
};

std::vector<std::string> experiment_names();

// dispatches on name, consumes the config, rejects leftover keys
OutputTable run_experiment(const std::string& name, RunConfig& cfg);

// shortest decimal text that round-trips to the same double
std::string format_double(double v);

// header block with the resolved config, then one row per line
void write_csv(std::ostream& os, const OutputTable& table, const RunConfig& cfg);
// same payload as an object {version, config, meta, columns, data}
void write_json(std::ostream& os, const OutputTable& table, const RunConfig& cfg);

} // namespace smc
