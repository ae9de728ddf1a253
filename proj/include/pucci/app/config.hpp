#pragma once

// Run configuration shared by the command line and JSON config files.
// Every key is checked; unknown keys and out-of-range values are rejected
// with the offending field named.

#include "pucci/error.hpp"
#include "pucci/expr.hpp"
#include "pucci/pucci_core.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace pucci::app {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "pucci_lab";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kInterfaceVersion = "1";
inline constexpr const char* kOutDirEnv = "PUCCI_LAB_OUT";

/// Malformed invocation or configuration (exit code 2).
class UsageError : public std::runtime_error {
public:
    UsageError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class Command { Eval, Transform, Growth, Shoot, Classify, Critical, Constants, Eigen, Ball, Scan, Verify };

inline const std::vector<std::pair<Command, const char*>>& command_names() {
    static const std::vector<std::pair<Command, const char*>> names = {
        {Command::Eval, "eval"},         {Command::Transform, "transform"}, {Command::Growth, "growth"},
        {Command::Shoot, "shoot"},       {Command::Classify, "classify"},   {Command::Critical, "critical"},
        {Command::Constants, "constants"}, {Command::Eigen, "eigen"},       {Command::Ball, "ball"},
        {Command::Scan, "scan"},         {Command::Verify, "verify"},
    };
    return names;
}

inline const char* to_string(Command c) {
    for (const auto& [k, n] : command_names())
        if (k == c) return n;
    return "?";
}

inline Command parse_command(const std::string& s) {
    for (const auto& [k, n] : command_names())
        if (s == n) return k;
    throw UsageError("command", "unknown command '" + s + "'");
}

/// Log-spaced grid lo:hi:count.
struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;

    std::vector<double> geometric() const {
        std::vector<double> out;
        for (int i = 0; i < count; ++i)
            out.push_back(i + 1 == count ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
        return out;
    }
    std::vector<double> linear() const {
        std::vector<double> out;
        for (int i = 0; i < count; ++i)
            out.push_back(i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
        return out;
    }
};

namespace detail {

inline double parse_real(const std::string& field, const std::string& text) {
    std::istringstream in(text);
    double v = 0.0;
    in >> v;
    if (!in || !in.eof() || !std::isfinite(v)) {
        in.clear();
        throw UsageError(field, "'" + text + "' is not a finite number");
    }
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace detail

inline Grid parse_grid(const std::string& field, const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw UsageError(field, "expected lo:hi:count, got '" + text + "'");
    Grid g;
    g.lo = detail::parse_real(field, parts[0]);
    g.hi = detail::parse_real(field, parts[1]);
    const double k = detail::parse_real(field, parts[2]);
    if (k != std::floor(k) || k < 2 || k > 1e6) throw UsageError(field, "count must be an integer >= 2");
    g.count = static_cast<int>(k);
    if (!(g.hi > g.lo)) throw UsageError(field, "hi must exceed lo");
    return g;
}

inline std::pair<double, double> parse_pair(const std::string& field, const std::string& text) {
    const auto parts = detail::split(text, ',');
    if (parts.size() != 2) throw UsageError(field, "expected lo,hi, got '" + text + "'");
    std::pair<double, double> out{detail::parse_real(field, parts[0]), detail::parse_real(field, parts[1])};
    if (!(out.second > out.first)) throw UsageError(field, "hi must exceed lo");
    return out;
}

struct RunConfig {
    Command command = Command::Constants;

    // pair: builtin name xor inline g/f (or a pair file, resolved on load)
    std::optional<std::string> pair;
    std::optional<std::string> g;
    std::optional<std::string> f;
    Params params;
    std::optional<std::string> pair_file;

    double lambda = 1.0;
    double Lambda = 1.0;
    int n = 3;
    OperatorSign sign = OperatorSign::Plus;

    // shooting and classification
    std::optional<double> p;
    std::optional<Grid> p_grid;
    double amplitude = 1.0;
    std::optional<double> rmax;  ///< default 1e4 for shots, 1e8 for the critical search
    double rtol = 1e-10;
    double oscillation_decades = 1.0;

    // critical
    std::optional<std::pair<double, double>> bracket;
    double tolp = 1e-6;

    // eigen / ball / scan
    std::optional<double> R;
    std::optional<Grid> amplitudes;
    std::optional<double> gamma;
    std::optional<std::string> psi;
    std::optional<double> pstar;  ///< supplied critical exponent for the hypothesis report
    int nodes = 4000;

    // transform / growth / eval
    std::string op = "phi";
    std::optional<double> at;
    double tol = 1e-10;
    std::optional<double> mu1;
    std::optional<std::string> expr;
    std::optional<json> matrix;

    // verify
    std::string suite = "operators";
    std::uint64_t seed = 0;
    int count = 1000;

    unsigned jobs = 1;
    std::optional<std::string> out;
    std::string format = "json";
};

inline double shot_rmax(const RunConfig& c) { return c.rmax.value_or(1e4); }
inline double critical_rmax(const RunConfig& c) { return c.rmax.value_or(1e8); }

inline bool needs_pair(Command c) {
    return c == Command::Transform || c == Command::Growth || c == Command::Ball || c == Command::Scan;
}

/// Range and consistency checks; throws UsageError naming the field.
inline void validate(const RunConfig& c) {
    const int pair_sources = (c.pair ? 1 : 0) + ((c.g || c.f) ? 1 : 0) + (c.pair_file ? 1 : 0);
    if (pair_sources > 1) throw UsageError("pair", "give either a builtin pair, inline g/f or a pair file, not several");
    if ((c.g && !c.f) || (!c.g && c.f)) throw UsageError(c.g ? "f" : "g", "inline pairs need both g and f");
    if (needs_pair(c.command) && pair_sources == 0) throw UsageError("pair", "this command needs a pair");
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw UsageError("lambda", "must be positive");
    if (!(c.Lambda >= c.lambda) || !std::isfinite(c.Lambda)) throw UsageError("Lambda", "must satisfy Lambda >= lambda");
    if (c.n < 1 || c.n > 64) throw UsageError("n", "must lie in 1..64");
    if (c.p && !(*c.p > 1.0)) throw UsageError("p", "must exceed 1");
    if (c.pstar && !(*c.pstar > 1.0)) throw UsageError("pstar", "must exceed 1");
    if (c.p_grid && !(c.p_grid->lo > 1.0)) throw UsageError("p_grid", "exponents must exceed 1");
    if (!(c.amplitude > 0.0)) throw UsageError("amplitude", "must be positive");
    if (c.rmax && !(*c.rmax > 1e-6 && std::isfinite(*c.rmax))) throw UsageError("rmax", "must exceed 1e-6");
    if (!(c.rtol > 0.0 && c.rtol < 1e-2)) throw UsageError("rtol", "must lie in (0, 1e-2)");
    if (!(c.oscillation_decades >= 1.0)) throw UsageError("oscillation_decades", "must be at least 1");
    if (c.bracket && !(c.bracket->first > 0.0)) throw UsageError("bracket", "ends must be positive");
    if (!(c.tolp > 0.0 && c.tolp < 1.0)) throw UsageError("tolp", "must lie in (0, 1)");
    if (c.R && !(*c.R > 0.0)) throw UsageError("R", "must be positive");
    if (c.amplitudes) {
        if (!(c.amplitudes->lo > 0.0)) throw UsageError("amplitudes", "must be positive");
        if (c.amplitudes->count < 20) throw UsageError("amplitudes", "need at least 20 points");
        if (c.amplitudes->lo > 1e-2 || c.amplitudes->hi < 1e2)
            throw UsageError("amplitudes", "grid must span at least [1e-2, 1e2]");
    }
    if (c.gamma && !(*c.gamma >= 0.0)) throw UsageError("gamma", "must be non-negative");
    if (c.gamma.has_value() != c.psi.has_value()) throw UsageError("psi", "gamma and psi go together");
    if (c.nodes < 100) throw UsageError("nodes", "need at least 100 nodes");
    if (!(c.tol > 0.0 && c.tol < 1e-2)) throw UsageError("tol", "must lie in (0, 1e-2)");
    if (c.mu1 && !(*c.mu1 > 0.0)) throw UsageError("mu1", "must be positive");
    if (c.count < 1 || c.count > 10000000) throw UsageError("count", "must lie in 1..1e7");
    if (c.jobs < 1 || c.jobs > 256) throw UsageError("jobs", "must lie in 1..256");
    if (c.format != "json" && c.format != "csv") throw UsageError("format", "must be json or csv");
    if (c.op != "G" && c.op != "phi" && c.op != "phiinv" && c.op != "h")
        throw UsageError("op", "must be one of G, phi, phiinv, h");
    if (c.suite != "operators" && c.suite != "lemma21" && c.suite != "transform")
        throw UsageError("suite", "must be one of operators, lemma21, transform");

    switch (c.command) {
        case Command::Shoot:
            if (!c.p && pair_sources == 0) throw UsageError("p", "shoot needs p or a pair");
            break;
        case Command::Classify:
            if (!c.p && !c.p_grid) throw UsageError("p", "classify needs p or p_grid");
            break;
        case Command::Eigen:
        case Command::Ball:
        case Command::Scan:
            if (!c.R) throw UsageError("R", "required");
            if (c.command == Command::Scan && !c.amplitudes) throw UsageError("amplitudes", "required");
            break;
        case Command::Transform:
            if (!c.at) throw UsageError("at", "required");
            if (!(*c.at >= 0.0)) throw UsageError("at", "must be non-negative");
            break;
        case Command::Growth:
            if (!c.mu1 && !c.R) throw UsageError("mu1", "give mu1 or R");
            break;
        case Command::Eval:
            if (c.expr.has_value() == c.matrix.has_value()) throw UsageError("expr", "give exactly one of expr and matrix");
            if (c.expr && !c.at) throw UsageError("at", "required with expr");
            break;
        default: break;
    }
}

// ---------------------------------------------------------------------------
// JSON form

namespace detail {

inline double get_real(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw UsageError(key, "expected a number");
    return v.get<double>();
}

inline std::string get_string(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw UsageError(key, "expected a string");
    return v.get<std::string>();
}

inline long long get_integer(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw UsageError(key, "expected an integer");
    return v.get<long long>();
}

inline Params get_params(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_object()) throw UsageError(key, "expected an object of name: number");
    Params out;
    for (const auto& [name, value] : v.items()) {
        if (!value.is_number()) throw UsageError(std::string(key) + "." + name, "expected a number");
        out[name] = value.get<double>();
    }
    return out;
}

inline Grid get_grid(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) return parse_grid(key, v.get<std::string>());
    if (v.is_array() && v.size() == 3 && v[0].is_number() && v[1].is_number() && v[2].is_number_integer()) {
        return parse_grid(key, json(v[0]).dump() + ":" + json(v[1]).dump() + ":" + json(v[2]).dump());
    }
    throw UsageError(key, "expected \"lo:hi:count\" or [lo, hi, count]");
}

}  // namespace detail

/// Reads a pair file {"g", "f", "params", "label"} into the config.
inline void apply_pair_file(RunConfig& c, const json& j) {
    static const std::set<std::string> keys{"g", "f", "params", "label"};
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!keys.count(k)) throw UsageError("pair_file." + k, "unknown key");
    }
    if (!j.contains("g") || !j.contains("f")) throw UsageError("pair_file", "needs g and f");
    c.g = detail::get_string(j, "g");
    c.f = detail::get_string(j, "f");
    if (j.contains("params"))
        for (const auto& [k, v] : detail::get_params(j, "params")) c.params.emplace(k, v);
}

inline json read_json_file(const std::string& path, const std::string& field) {
    std::ifstream in(path);
    if (!in) throw UsageError(field, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(field, "'" + path + "' is not valid JSON (byte " + std::to_string(e.byte) + "): " + e.what());
    }
}

inline RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw UsageError("", "configuration must be a JSON object");
    static const std::set<std::string> known{
        "command", "pair", "g", "f", "params", "pair_file", "lambda", "Lambda", "n", "sign", "p", "p_grid",
        "amplitude", "rmax", "rtol", "oscillation_decades", "bracket", "tolp", "R", "amplitudes", "gamma", "psi",
        "pstar", "nodes", "op", "at", "tol", "mu1", "expr", "matrix", "suite", "seed", "count", "jobs", "out", "format"};
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!known.count(k)) throw UsageError(k, "unknown key");
    }
    if (!j.contains("command")) throw UsageError("command", "required");
    RunConfig c;
    c.command = parse_command(detail::get_string(j, "command"));
    if (j.contains("pair")) c.pair = detail::get_string(j, "pair");
    if (j.contains("g")) c.g = detail::get_string(j, "g");
    if (j.contains("f")) c.f = detail::get_string(j, "f");
    if (j.contains("params")) c.params = detail::get_params(j, "params");
    if (j.contains("pair_file")) c.pair_file = detail::get_string(j, "pair_file");
    if (j.contains("lambda")) c.lambda = detail::get_real(j, "lambda");
    if (j.contains("Lambda")) c.Lambda = detail::get_real(j, "Lambda");
    if (j.contains("n")) c.n = static_cast<int>(detail::get_integer(j, "n"));
    if (j.contains("sign")) {
        try {
            c.sign = parse_sign(detail::get_string(j, "sign"));
        } catch (const pucci::Error& e) {
            throw UsageError("sign", e.what());
        }
    }
    if (j.contains("p")) c.p = detail::get_real(j, "p");
    if (j.contains("pstar")) c.pstar = detail::get_real(j, "pstar");
    if (j.contains("p_grid")) c.p_grid = detail::get_grid(j, "p_grid");
    if (j.contains("amplitude")) c.amplitude = detail::get_real(j, "amplitude");
    if (j.contains("rmax")) c.rmax = detail::get_real(j, "rmax");
    if (j.contains("rtol")) c.rtol = detail::get_real(j, "rtol");
    if (j.contains("oscillation_decades")) c.oscillation_decades = detail::get_real(j, "oscillation_decades");
    if (j.contains("bracket")) {
        const auto& b = j.at("bracket");
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
            throw UsageError("bracket", "expected [lo, hi]");
        c.bracket = std::pair{b[0].get<double>(), b[1].get<double>()};
        if (!(c.bracket->second > c.bracket->first)) throw UsageError("bracket", "hi must exceed lo");
    }
    if (j.contains("tolp")) c.tolp = detail::get_real(j, "tolp");
    if (j.contains("R")) c.R = detail::get_real(j, "R");
    if (j.contains("amplitudes")) c.amplitudes = detail::get_grid(j, "amplitudes");
    if (j.contains("gamma")) c.gamma = detail::get_real(j, "gamma");
    if (j.contains("psi")) c.psi = detail::get_string(j, "psi");
    if (j.contains("nodes")) c.nodes = static_cast<int>(detail::get_integer(j, "nodes"));
    if (j.contains("op")) c.op = detail::get_string(j, "op");
    if (j.contains("at")) c.at = detail::get_real(j, "at");
    if (j.contains("tol")) c.tol = detail::get_real(j, "tol");
    if (j.contains("mu1")) c.mu1 = detail::get_real(j, "mu1");
    if (j.contains("expr")) c.expr = detail::get_string(j, "expr");
    if (j.contains("matrix")) c.matrix = j.at("matrix");
    if (j.contains("suite")) c.suite = detail::get_string(j, "suite");
    if (j.contains("seed")) {
        const auto s = detail::get_integer(j, "seed");
        if (s < 0) throw UsageError("seed", "must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("count")) c.count = static_cast<int>(detail::get_integer(j, "count"));
    if (j.contains("jobs")) {
        const auto k = detail::get_integer(j, "jobs");
        if (k < 1 || k > 256) throw UsageError("jobs", "must lie in 1..256");
        c.jobs = static_cast<unsigned>(k);
    }
    if (j.contains("out")) c.out = detail::get_string(j, "out");
    if (j.contains("format")) c.format = detail::get_string(j, "format");
    validate(c);
    return c;
}

/// Loads and validates a JSON run configuration.
inline RunConfig load_config(const std::string& path) { return config_from_json(read_json_file(path, "config")); }

/// Echo of the settings relevant to the command, for run records.
inline json config_echo(const RunConfig& c) {
    json j;
    j["command"] = to_string(c.command);
    if (c.pair) j["pair"] = *c.pair;
    if (c.g) j["g"] = *c.g;
    if (c.f) j["f"] = *c.f;
    if (!c.params.empty()) {
        json p = json::object();
        for (const auto& [k, v] : c.params) p[k] = v;
        j["params"] = p;
    }
    if (c.pair_file) j["pair_file"] = *c.pair_file;
    const bool uses_ell = c.command != Command::Eval && c.command != Command::Transform &&
                          c.command != Command::Verify && c.command != Command::Growth;
    if (uses_ell || c.matrix) {
        j["lambda"] = c.lambda;
        j["Lambda"] = c.Lambda;
        j["n"] = c.n;
    }
    if (uses_ell && c.command != Command::Constants) j["sign"] = to_string(c.sign);
    switch (c.command) {
        case Command::Shoot:
        case Command::Classify:
            if (c.p) j["p"] = *c.p;
            if (c.p_grid) j["p_grid"] = {c.p_grid->lo, c.p_grid->hi, c.p_grid->count};
            j["amplitude"] = c.amplitude;
            j["rmax"] = shot_rmax(c);
            j["rtol"] = c.rtol;
            if (c.command == Command::Classify) j["oscillation_decades"] = c.oscillation_decades;
            break;
        case Command::Critical:
            if (c.bracket) j["bracket"] = {c.bracket->first, c.bracket->second};
            j["tolp"] = c.tolp;
            j["rmax"] = critical_rmax(c);
            j["rtol"] = c.rtol;
            break;
        case Command::Eigen: j["R"] = *c.R; break;
        case Command::Ball:
        case Command::Scan:
            j["R"] = *c.R;
            if (c.bracket) j["bracket"] = {c.bracket->first, c.bracket->second};
            if (c.amplitudes) j["amplitudes"] = {c.amplitudes->lo, c.amplitudes->hi, c.amplitudes->count};
            if (c.gamma) j["gamma"] = *c.gamma;
            if (c.psi) j["psi"] = *c.psi;
            if (c.p) j["p"] = *c.p;
            if (c.pstar) j["pstar"] = *c.pstar;
            j["nodes"] = c.nodes;
            break;
        case Command::Transform:
            j["op"] = c.op;
            j["at"] = *c.at;
            j["tol"] = c.tol;
            break;
        case Command::Growth:
            if (c.mu1) j["mu1"] = *c.mu1;
            if (c.R) j["R"] = *c.R;
            if (c.p) j["p"] = *c.p;
            if (c.gamma) j["gamma"] = *c.gamma;
            j["tol"] = c.tol;
            if (c.R) {
                j["lambda"] = c.lambda;
                j["Lambda"] = c.Lambda;
                j["n"] = c.n;
                j["sign"] = to_string(c.sign);
            }
            break;
        case Command::Eval:
            if (c.expr) j["expr"] = *c.expr;
            if (c.at) j["at"] = *c.at;
            if (c.matrix) {
                j["matrix"] = *c.matrix;
                j["sign"] = to_string(c.sign);
            }
            break;
        case Command::Verify:
            j["suite"] = c.suite;
            j["seed"] = c.seed;
            j["count"] = c.count;
            break;
        default: break;
    }
    return j;
}

}  // namespace pucci::app
