#include "smc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "smc/constants.hpp"
#include "smc/errors.hpp"

namespace smc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct UnitScale {
    const char* suffix;
    double scale;
};

// longest match wins, so "mT" is checked before "T" by ordering below
constexpr UnitScale unit_table[] = {
    {"GHz", 1e9},  {"MHz", 1e6},  {"kHz", 1e3},   {"Hz", 1.0},
    {"mT", 1e-3},  {"uT", 1e-6},  {"nT", 1e-9},   {"pT", 1e-12}, {"T", 1.0},
    {"G", 1e-4},
    {"ms", 1e-3},  {"us", 1e-6},  {"ns", 1e-9},   {"ps", 1e-12}, {"s", 1.0},
    {"mm", 1e-3},  {"um", 1e-6},  {"nm", 1e-9},   {"m", 1.0},
    {"mrad", 1e-3}, {"urad", 1e-6}, {"rad", 1.0},
    {"deg", pi / 180.0},
    {"K", 1.0},
    {"V", 1.0},
    {"%", 0.01},
};

} // namespace

double parse_quantity(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw InvalidInput("empty quantity");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str()) throw InvalidInput("not a number: '" + t + "'");
    if (errno == ERANGE) throw InvalidInput("number out of range: '" + t + "'");
    std::string unit = trim(std::string(end));
    if (unit.empty()) return v;
    for (const auto& u : unit_table)
        if (unit == u.suffix) return v * u.scale;
    throw InvalidInput("unknown unit suffix '" + unit + "' in '" + t + "'");
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream all;
    all << in.rdbuf();
    return parse_text(all.str(), path);
}

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no, key);
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(full))
            throw ConfigError("duplicate key '" + full + "'", line_no, full);
        cfg.entries_[full] = Entry{value, line_no, false};
    }
    return cfg;
}

void RunConfig::apply_override(const std::string& key_equals_value) {
    const auto eq = key_equals_value.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like section.key=value: '" + key_equals_value + "'");
    const std::string key = trim(key_equals_value.substr(0, eq));
    const std::string value = trim(key_equals_value.substr(eq + 1));
    if (key.empty() || value.empty())
        throw ConfigError("override must look like section.key=value: '" + key_equals_value + "'");
    set(key, value);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    entries_[key] = Entry{value, 0, false};
}

const RunConfig::Entry* RunConfig::find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
}

const RunConfig::Entry& RunConfig::require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError("missing required key '" + key + "'", 0, key);
    return *e;
}

bool RunConfig::has(const std::string& key) const { return find(key) != nullptr; }

std::string RunConfig::get_string(const std::string& key) const { return require(key).value; }

std::string RunConfig::get_string_or(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double RunConfig::get_quantity(const std::string& key) const {
    const Entry& e = require(key);
    try {
        return parse_quantity(e.value);
    } catch (const InvalidInput& err) {
        throw ConfigError(std::string(err.what()) + " (key '" + key + "')", e.line, key);
    }
}

double RunConfig::get_quantity_or(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    try {
        return parse_quantity(e->value);
    } catch (const InvalidInput& err) {
        throw ConfigError(std::string(err.what()) + " (key '" + key + "')", e->line, key);
    }
}

std::int64_t RunConfig::get_int(const std::string& key) const {
    const Entry& e = require(key);
    const double v = get_quantity(key);
    const auto r = static_cast<std::int64_t>(std::llround(v));
    if (std::fabs(v - double(r)) > 1e-9 * std::max(1.0, std::fabs(v)))
        throw ConfigError("expected an integer for '" + key + "'", e.line, key);
    return r;
}

std::int64_t RunConfig::get_int_or(const std::string& key, std::int64_t fallback) const {
    return find(key) ? get_int(key) : fallback;
}

bool RunConfig::get_bool_or(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    const std::string v = e->value;
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("expected a boolean for '" + key + "'", e->line, key);
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        try {
            out.push_back(parse_quantity(piece));
        } catch (const InvalidInput& err) {
            throw ConfigError(std::string(err.what()) + " (key '" + key + "')", e.line, key);
        }
    }
    if (out.empty()) throw ConfigError("empty list for '" + key + "'", e.line, key);
    return out;
}

std::vector<double> RunConfig::get_list_or(const std::string& key,
                                           const std::vector<double>& fallback) const {
    return entries_.count(key) ? get_list(key) : fallback;
}

void RunConfig::require_consumed() const {
    for (const auto& [key, entry] : entries_) {
        if (!entry.consumed)
            throw ConfigError("unknown key '" + key + "' (not used by this experiment)",
                              entry.line, key);
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) out.emplace_back(key, entry.value);
    return out;
}

} // namespace smc
