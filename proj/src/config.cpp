#include "latheat/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "latheat/fourier.hpp"

namespace latheat {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_inline_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

ConfigValue parse_value(Cursor& c, const std::string& origin);

ConfigValue parse_array(Cursor& c, const std::string& origin) {
    ConfigArray arr;
    c.take(); // '['
    for (;;) {
        c.skip_inline_ws();
        while (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) {
            c.take();
            c.skip_inline_ws();
        }
        if (c.done()) fail(origin, c.line, "unterminated array");
        if (c.peek() == ']') {
            c.take();
            break;
        }
        arr.push_back(parse_value(c, origin));
        c.skip_inline_ws();
        while (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) {
            c.take();
            c.skip_inline_ws();
        }
        if (!c.done() && c.peek() == ',') {
            c.take();
            continue;
        }
        if (!c.done() && c.peek() == ']') {
            c.take();
            break;
        }
        fail(origin, c.line, "expected ',' or ']' in array");
    }
    return ConfigValue{std::move(arr)};
}

ConfigValue parse_value(Cursor& c, const std::string& origin) {
    c.skip_inline_ws();
    if (c.done()) fail(origin, c.line, "missing value");
    const char ch = c.peek();
    if (ch == '[') return parse_array(c, origin);
    if (ch == '"') {
        c.take();
        std::string s;
        while (!c.done() && c.peek() != '"') {
            char d = c.take();
            if (d == '\\' && !c.done()) d = c.take();
            s += d;
        }
        if (c.done()) fail(origin, c.line, "unterminated string");
        c.take();
        return ConfigValue{std::move(s)};
    }
    std::string token;
    while (!c.done() && c.peek() != '\n' && c.peek() != '\r' && c.peek() != ',' &&
           c.peek() != ']' && c.peek() != '#')
        token += c.take();
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.pop_back();
    if (token == "true") return ConfigValue{true};
    if (token == "false") return ConfigValue{false};
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return ConfigValue{v};
    } catch (const std::exception&) {
        fail(origin, c.line, "cannot parse value '" + token + "'");
    }
}

} // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.source_ = text;
    Cursor c{text};
    std::string section;
    while (!c.done()) {
        c.skip_inline_ws();
        if (c.done()) break;
        const char ch = c.peek();
        if (ch == '\n' || ch == '\r') {
            c.take();
            continue;
        }
        if (ch == '#') {
            while (!c.done() && c.peek() != '\n') c.take();
            continue;
        }
        if (ch == '[') {
            c.take();
            section.clear();
            while (!c.done() && c.peek() != ']' && c.peek() != '\n') section += c.take();
            if (c.done() || c.peek() != ']') fail(origin, c.line, "unterminated section header");
            c.take();
            continue;
        }
        std::string key;
        while (!c.done() && c.peek() != '=' && c.peek() != '\n') key += c.take();
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        if (c.done() || c.peek() != '=') fail(origin, c.line, "expected '=' after key '" + key + "'");
        c.take();
        if (key.empty()) fail(origin, c.line, "empty key");
        ConfigValue value = parse_value(c, origin);
        c.skip_inline_ws();
        if (!c.done() && c.peek() == '#')
            while (!c.done() && c.peek() != '\n') c.take();
        if (!c.done() && c.peek() != '\n' && c.peek() != '\r')
            fail(origin, c.line, "trailing characters after value for '" + key + "'");
        const std::string dotted = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(dotted)) fail(origin, c.line, "duplicate key '" + dotted + "'");
        cfg.entries_.emplace(dotted, std::move(value));
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str(), path);
}

const ConfigValue& Config::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

double Config::number(const std::string& key) const {
    const ConfigValue& v = get(key);
    if (!v.is_number()) throw ConfigError("key '" + key + "' is not a number");
    return std::get<double>(v.data);
}

double Config::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long long Config::integer(const std::string& key) const {
    const double v = number(key);
    const long long i = static_cast<long long>(std::llround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9)
        throw ConfigError("key '" + key + "' is not an integer");
    return i;
}

long long Config::integer_or(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool Config::boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const ConfigValue& v = get(key);
    if (!v.is_bool()) throw ConfigError("key '" + key + "' is not a boolean");
    return std::get<bool>(v.data);
}

std::string Config::text(const std::string& key) const {
    const ConfigValue& v = get(key);
    if (!v.is_string()) throw ConfigError("key '" + key + "' is not a string");
    return std::get<std::string>(v.data);
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

std::vector<double> Config::number_list(const std::string& key) const {
    const ConfigValue& v = get(key);
    if (!v.is_array()) throw ConfigError("key '" + key + "' is not an array");
    std::vector<double> out;
    for (const ConfigValue& e : std::get<ConfigArray>(v.data)) {
        if (!e.is_number()) throw ConfigError("key '" + key + "' must contain numbers");
        out.push_back(std::get<double>(e.data));
    }
    return out;
}

std::vector<std::pair<double, double>> Config::pair_list(const std::string& key) const {
    const ConfigValue& v = get(key);
    if (!v.is_array()) throw ConfigError("key '" + key + "' is not an array");
    std::vector<std::pair<double, double>> out;
    for (const ConfigValue& e : std::get<ConfigArray>(v.data)) {
        if (!e.is_array()) throw ConfigError("key '" + key + "' must contain [t0, w] pairs");
        const ConfigArray& p = std::get<ConfigArray>(e.data);
        if (p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError("key '" + key + "' must contain [t0, w] pairs");
        out.emplace_back(std::get<double>(p[0].data), std::get<double>(p[1].data));
    }
    return out;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
}

// ---------------------------------------------------------------------------
// Scenario resolution.
// ---------------------------------------------------------------------------

CoefficientModel parse_coefficient(const Config& cfg, const std::string& section) {
    CoefficientModel m;
    const std::string kind = cfg.text_or(section + ".kind", "constant");
    if (kind == "constant") {
        m.regular.kind = RegularPart::Kind::constant;
        m.regular.value = cfg.number_or(section + ".value", 0.0);
    } else if (kind == "polynomial") {
        m.regular.kind = RegularPart::Kind::polynomial;
        m.regular.poly = cfg.number_list(section + ".coeffs");
        if (m.regular.poly.empty()) throw ConfigError(section + ": empty polynomial");
    } else if (kind == "oscillation") {
        m.regular.kind = RegularPart::Kind::oscillation;
        m.regular.base = cfg.number_or(section + ".base", 0.0);
        m.regular.amplitude = cfg.number_or(section + ".amplitude", 0.0);
        m.regular.omega = cfg.number_or(section + ".omega", 1.0);
    } else {
        throw ConfigError(section + ": unknown coefficient kind '" + kind + "'");
    }
    if (cfg.has(section + ".delta"))
        for (auto [t0, w] : cfg.pair_list(section + ".delta")) m.delta_atoms.push_back({t0, w});
    if (cfg.has(section + ".heaviside"))
        for (auto [t0, w] : cfg.pair_list(section + ".heaviside"))
            m.heaviside_atoms.push_back({t0, w});
    return m;
}

namespace {

GridFunction parse_initial(const Config& cfg, const std::string& section,
                           const LatticeSpec& spec, std::uint64_t seed) {
    const std::string kind = cfg.text_or(section + ".kind", "gaussian_band");
    if (kind == "zero") return GridFunction::zeros(spec);
    if (kind == "point") return point_mass(spec);
    if (kind == "constant")
        return constant_grid(spec, cfg.number_or(section + ".value", 1.0));
    if (kind == "mode") {
        const std::vector<double> raw = cfg.number_list(section + ".mode");
        if (static_cast<int>(raw.size()) != spec.dim)
            throw ConfigError(section + ".mode: arity does not match the lattice dimension");
        std::vector<int> mode;
        for (double v : raw) mode.push_back(static_cast<int>(std::llround(v)));
        return plane_wave(spec, mode);
    }
    if (kind == "gaussian_band") {
        const double sigma = cfg.number_or(section + ".sigma", 1.0);
        const int band = static_cast<int>(cfg.integer_or(section + ".band", spec.points / 4));
        const double amp = cfg.number_or(section + ".amplitude", 1.0);
        return inverse(gaussian_band_spectrum(spec, sigma, band, amp));
    }
    if (kind == "random_band") {
        const int band = static_cast<int>(cfg.integer_or(section + ".band", spec.points / 4));
        Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::vector<complex_t> v(spec.site_count());
        for (std::size_t i = 0; i < v.size(); ++i) {
            bool inside = true;
            for (int d = 0; d < spec.dim && inside; ++d)
                inside = std::abs(signed_component(spec, i, d)) <= band;
            if (inside) v[i] = complex_t(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
        SpectralFunction sf(spec, std::move(v));
        return inverse(sf);
    }
    throw ConfigError(section + ": unknown initial data kind '" + kind + "'");
}

OmegaSchedule parse_schedule(const Config& cfg, const std::string& section,
                             OmegaSchedule::Kind fallback) {
    OmegaSchedule s;
    const std::string kind =
        cfg.text_or(section + ".omega",
                    fallback == OmegaSchedule::Kind::log_reciprocal ? "log" : "power");
    if (kind == "log") {
        s.kind = OmegaSchedule::Kind::log_reciprocal;
    } else if (kind == "power") {
        s.kind = OmegaSchedule::Kind::power;
        s.exponent = cfg.number_or(section + ".omega_power", 1.0);
    } else {
        throw ConfigError(section + ".omega: expected 'log' or 'power'");
    }
    return s;
}

std::vector<double> parse_eps_grid(const Config& cfg, const std::string& section) {
    if (cfg.has(section + ".eps")) {
        std::vector<double> g = cfg.number_list(section + ".eps");
        if (g.size() < 4) throw ConfigError(section + ".eps: need at least 4 values");
        return g;
    }
    const int jmin = static_cast<int>(cfg.integer_or(section + ".eps_jmin", 2));
    const int jmax = static_cast<int>(cfg.integer_or(section + ".eps_jmax", 12));
    if (jmax < jmin + 3) throw ConfigError(section + ": eps exponent range too small");
    std::vector<double> g;
    for (int j = jmin; j <= jmax; ++j) g.push_back(std::pow(2.0, -j));
    return g;
}

} // namespace

Scenario resolve_scenario(const Config& cfg) {
    Scenario sc;
    sc.kind = cfg.text("experiment.kind");
    sc.output_dir = cfg.text_or("output.dir", "out");
    sc.seed = static_cast<std::uint64_t>(cfg.integer_or("output.seed", 1));
    sc.workers = static_cast<int>(cfg.integer_or("output.workers", 0));

    const bool is_limit = sc.kind == "limit";

    if (!is_limit) {
        LatticeSpec spec;
        spec.dim = static_cast<int>(cfg.integer_or("lattice.n", 1));
        spec.hbar = cfg.number_or("lattice.hbar", 1.0);
        spec.points = static_cast<int>(cfg.integer_or("lattice.points", 16));
        spec.validate();

        sc.net.spec = spec;
        sc.net.alpha = cfg.number_or("problem.alpha", 1.0);
        sc.net.horizon = cfg.number_or("problem.T", 1.0);
        sc.net.weight_order = cfg.number_or("problem.s", 0.0);
        sc.net.time_steps = static_cast<int>(cfg.integer_or("problem.nt", 256));
        if (sc.net.time_steps % 4 != 0)
            throw ConfigError("problem.nt must be a multiple of 4");
        const std::string symbol = cfg.text_or("problem.symbol", "lattice");
        if (symbol == "lattice")
            sc.net.symbol = SymbolChoice::lattice;
        else if (symbol == "continuous")
            sc.net.symbol = SymbolChoice::continuous;
        else
            throw ConfigError("problem.symbol: expected 'lattice' or 'continuous'");

        sc.net.a = parse_coefficient(cfg, "coefficient.a");
        sc.net.b = parse_coefficient(cfg, "coefficient.b");
        sc.net.u0 = parse_initial(cfg, "initial", spec, sc.seed);
        if (cfg.text_or("source.kind", "zero") != "zero") {
            sc.net.source_profile = parse_initial(cfg, "source.profile", spec, sc.seed + 1);
            sc.net.source_time = parse_coefficient(cfg, "source.time");
        }

        sc.eps_grid = parse_eps_grid(cfg, "experiment");
        // The consistency run compares against a fixed classical solution, so
        // its default schedule is the power law (the logarithmic schedule
        // cannot reach the smallness gate over any practical eps range).
        sc.schedule = parse_schedule(cfg, "experiment",
                                     sc.kind == "consistency" ? OmegaSchedule::Kind::power
                                                              : OmegaSchedule::Kind::log_reciprocal);
        sc.q = static_cast<int>(cfg.integer_or("experiment.q", 2));
        const std::string target = cfg.text_or("experiment.perturb", "b");
        if (target == "a")
            sc.perturb = PerturbTarget::a;
        else if (target == "b")
            sc.perturb = PerturbTarget::b;
        else if (target == "source")
            sc.perturb = PerturbTarget::source;
        else if (target == "none")
            sc.perturb = PerturbTarget::none;
        else
            throw ConfigError("experiment.perturb: expected 'a', 'b', 'source' or 'none'");
        sc.trials = static_cast<int>(cfg.integer_or("experiment.trials", 20));
        sc.keep_states = cfg.boolean_or("output.states", true);
    } else {
        LimitProblem& lp = sc.limit;
        lp.dim = static_cast<int>(cfg.integer_or("lattice.n", 1));
        lp.alpha = cfg.number_or("problem.alpha", 1.0);
        lp.smoothness = cfg.number_or("problem.m", 4.0 * lp.alpha);
        lp.base_points = static_cast<int>(cfg.integer_or("lattice.base_points", 8));
        lp.j_min = static_cast<int>(cfg.integer_or("experiment.j_min", 1));
        lp.j_max = static_cast<int>(cfg.integer_or("experiment.j_max", 6));
        lp.horizon = cfg.number_or("problem.T", 1.0);
        lp.time_steps = static_cast<int>(cfg.integer_or("problem.nt", 128));
        lp.output_count = static_cast<int>(cfg.integer_or("experiment.outputs", 9));
        const std::string kind = cfg.text_or("initial.kind", "gaussian_band");
        if (kind == "gaussian_band") {
            lp.data.kind = LimitSpectralData::Kind::gaussian_band;
            lp.data.sigma = cfg.number_or("initial.sigma", 1.0);
            lp.data.band = static_cast<int>(cfg.integer_or("initial.band", lp.base_points - 1));
            lp.data.amplitude = cfg.number_or("initial.amplitude", 1.0);
        } else if (kind == "mode") {
            lp.data.kind = LimitSpectralData::Kind::single_mode;
            for (double v : cfg.number_list("initial.mode"))
                lp.data.mode.push_back(static_cast<int>(std::llround(v)));
            lp.data.amplitude = cfg.number_or("initial.amplitude", 1.0);
        } else {
            throw ConfigError("initial.kind: limit runs take 'gaussian_band' or 'mode'");
        }
        lp.a = parse_coefficient(cfg, "coefficient.a");
        lp.b = parse_coefficient(cfg, "coefficient.b");
        if (cfg.has("experiment.fixed_eps")) lp.fixed_eps = cfg.number("experiment.fixed_eps");
        lp.schedule = parse_schedule(cfg, "experiment", OmegaSchedule::Kind::log_reciprocal);
    }
    return sc;
}

} // namespace latheat
