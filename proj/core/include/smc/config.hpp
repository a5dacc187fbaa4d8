#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace smc {

// "271.5G", "7ms", "2.87GHz", "45deg", "10um", "1e8" ... -> SI base units.
// throws InvalidInput on malformed numbers or unknown suffixes.
double parse_quantity(const std::string& text);

// flat key-value store parsed from an ini-like text:
//   # comment
//   [section]
//   key = value
// keys are addressed as "section.key" ("key" alone for the top scope).
// every key must be consumed by the experiment that runs; leftovers are
// reported as config errors with their line number.
class RunConfig {
  public:
    RunConfig() = default;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_text(const std::string& text, const std::string& origin = "<inline>");

    // "section.key=value"; creates or replaces, line number 0
    void apply_override(const std::string& key_equals_value);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_quantity(const std::string& key) const;
    double get_quantity_or(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    // comma-separated quantities
    std::vector<double> get_list(const std::string& key) const;
    std::vector<double> get_list_or(const std::string& key,
                                    const std::vector<double>& fallback) const;

    // throws ConfigError naming the first key nothing ever read
    void require_consumed() const;

    // resolved entries sorted by key, for output headers
    std::vector<std::pair<std::string, std::string>> entries() const;
    const std::string& origin() const { return origin_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    const Entry* find(const std::string& key) const;
    const Entry& require(const std::string& key) const;

    std::map<std::string, Entry> entries_;
    std::string origin_ = "<empty>";
};

// built-in experiment configurations; throws ConfigError on unknown names
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

} // namespace smc
