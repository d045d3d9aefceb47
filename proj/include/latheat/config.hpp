#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "latheat/experiments.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Flat sectioned key/value configuration (a TOML-compatible subset):
// [section.sub] headers, `key = value` lines, # comments. Values are numbers,
// booleans, quoted strings, and (nested) arrays of those.
// ---------------------------------------------------------------------------

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;

struct ConfigValue {
    std::variant<double, bool, std::string, ConfigArray> data;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<ConfigArray>(data); }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& dotted_key) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long long integer(const std::string& key) const;
    long long integer_or(const std::string& key, long long fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> number_list(const std::string& key) const;
    // Arrays of [x, y] pairs.
    std::vector<std::pair<double, double>> pair_list(const std::string& key) const;
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    const std::string& source_text() const { return source_; }

  private:
    std::map<std::string, ConfigValue> entries_;
    std::string source_;
    const ConfigValue& get(const std::string& key) const;
};

// ---------------------------------------------------------------------------
// Scenario resolution: turn a parsed config into experiment inputs.
// ---------------------------------------------------------------------------

struct Scenario {
    std::string kind; // solve | veryweak | uniqueness | consistency | limit | verify | stencil
    std::string output_dir;
    std::uint64_t seed = 1;
    int workers = 0; // 0 = library default

    // Common problem data (populated for all kinds except pure stencil runs).
    NetProblem net;
    std::vector<double> eps_grid;
    OmegaSchedule schedule;

    // Uniqueness knobs.
    int q = 2;
    PerturbTarget perturb = PerturbTarget::b;

    // Limit sweep.
    LimitProblem limit;

    // Verify knobs.
    int trials = 20;

    // Solve-only extras.
    bool keep_states = false;
};

// Throws ConfigError with a line-oriented message on any unresolved or
// ill-typed descriptor.
Scenario resolve_scenario(const Config& cfg);

CoefficientModel parse_coefficient(const Config& cfg, const std::string& section);

} // namespace latheat
