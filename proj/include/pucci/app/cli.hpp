#pragma once

// Command-line front end: argv -> RunConfig -> execute -> stdout / --out.
// Exit codes: 0 success, 1 domain or numerical failure, 2 usage error.

#include "pucci/app/commands.hpp"
#include "pucci/app/config.hpp"
#include "pucci/app/records.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

namespace pucci::app {

namespace detail {

inline std::string version_string() {
    return std::string(kToolName) + " " + kToolVersion + " (interface " + kInterfaceVersion + ")";
}

template <class T>
void option(CLI::App* sub, const std::string& name, std::optional<T>& slot, const std::string& help) {
    sub->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

template <class T>
void option(CLI::App* sub, const std::string& name, T& slot, const std::string& help) {
    sub->add_option(name, slot, help)->capture_default_str();
}

inline void add_ellipticity(CLI::App* sub, RunConfig& c, bool with_sign = true) {
    detail::option(sub, "--lambda", c.lambda, "smaller ellipticity constant");
    detail::option(sub, "--Lambda", c.Lambda, "larger ellipticity constant");
    detail::option(sub, "--n", c.n, "space dimension");
    if (with_sign)
        sub->add_option_function<std::string>(
            "--sign",
            [&c](const std::string& s) {
                try {
                    c.sign = parse_sign(s);
                } catch (const pucci::Error& e) {
                    throw UsageError("sign", e.what());
                }
            },
            "plus or minus");
}

inline void add_pair(CLI::App* sub, RunConfig& c) {
    detail::option(sub, "--pair", c.pair, "builtin pair name");
    detail::option(sub, "--g", c.g, "inline g(t)");
    detail::option(sub, "--f", c.f, "inline f(t)");
    detail::option(sub, "--pair-file", c.pair_file, "JSON pair file {g, f, params, label}");
    sub->add_option_function<std::vector<std::string>>(
           "--param",
           [&c](const std::vector<std::string>& items) {
               for (const auto& item : items) {
                   const auto eq = item.find('=');
                   if (eq == std::string::npos || eq == 0) throw UsageError("param", "expected name=value, got '" + item + "'");
                   c.params[item.substr(0, eq)] = detail::parse_real("param", item.substr(eq + 1));
               }
           },
           "pair parameter name=value (repeatable)")
        ->allow_extra_args(false);
}

inline void add_shot(CLI::App* sub, RunConfig& c) {
    detail::option(sub, "--amplitude", c.amplitude, "v(0)");
    detail::option(sub, "--rmax", c.rmax, "outer radius of the shot");
    detail::option(sub, "--rtol", c.rtol, "relative integration tolerance");
}

}  // namespace detail

/// Writes the records and companion files. With an output directory the
/// record goes to <command>.<format>; otherwise to `out`.
inline void emit(const RunConfig& c, const Outcome& o, std::ostream& out) {
    std::string dir;
    if (c.out) {
        dir = *c.out;
    } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
        dir = env;
    }
    const std::string text = o.records.size() == 1 && c.format == "json"
                                 ? to_json(o.records[0]).dump(2) + "\n"
                                 : render_table(o.records, c.format);
    if (dir.empty()) {
        out << text;
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    const std::filesystem::path base(dir);
    write_text((base / (std::string(to_string(c.command)) + "." + c.format)).string(), text);
    for (const auto& [name, contents] : o.files)
        write_text((base / (std::string(to_string(c.command)) + "_" + name)).string(), contents);
}

/// Full command-line entry point.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    CLI::App app{"Radial Pucci equations with quadratic gradient terms", kToolName};
    app.set_version_flag("--version", detail::version_string());
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    RunConfig c;
    std::string config_path;
    unsigned jobs = 1;
    std::optional<std::string> out_dir;
    std::string format = "json";
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
    detail::option(&app, "--out", out_dir, "output directory (default: $" + std::string(kOutDirEnv) + " or stdout)");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    std::vector<std::pair<CLI::App*, Command>> subs;
    auto add = [&](Command cmd, const std::string& help) {
        CLI::App* s = app.add_subcommand(to_string(cmd), help);
        subs.emplace_back(s, cmd);
        return s;
    };

    {
        auto* s = add(Command::Eval, "evaluate an expression at t, or a Pucci operator on a matrix");
        detail::option(s, "--expr", c.expr, "expression in t");
        detail::option(s, "--at", c.at, "value of t");
        s->add_option_function<std::string>(
            "--matrix",
            [&c](const std::string& m) {
                try {
                    c.matrix = json::parse(m);
                } catch (const json::parse_error&) {
                    c.matrix = read_json_file(m, "matrix");
                }
            },
            "JSON {dim, upper} inline or a file path");
        s->add_option_function<std::vector<std::string>>("--param", [&c](const std::vector<std::string>& items) {
            for (const auto& item : items) {
                const auto eq = item.find('=');
                if (eq == std::string::npos || eq == 0) throw UsageError("param", "expected name=value");
                c.params[item.substr(0, eq)] = detail::parse_real("param", item.substr(eq + 1));
            }
        }, "parameter name=value (repeatable)");
        detail::add_ellipticity(s, c);
    }
    {
        auto* s = add(Command::Transform, "G, phi, phi^-1 or h of a pair at one point");
        detail::add_pair(s, c);
        s->add_option("--op", c.op, "G, phi, phiinv or h")->check(CLI::IsMember({"G", "phi", "phiinv", "h"}));
        detail::option(s, "--at", c.at, "evaluation point");
        detail::option(s, "--tol", c.tol, "transform tolerance");
    }
    {
        auto* s = add(Command::Growth, "sublinear / superlinear classification of h");
        detail::add_pair(s, c);
        detail::option(s, "--mu1", c.mu1, "first eigenvalue to compare against");
        detail::option(s, "--R", c.R, "ball radius (computes mu1 when --mu1 is absent)");
        detail::option(s, "--p", c.p, "exponent for the C* ratio");
        detail::option(s, "--gamma", c.gamma, "lower-bound check f >= -gamma phi e^-G");
        detail::option(s, "--tol", c.tol, "transform tolerance");
        detail::add_ellipticity(s, c);
    }
    {
        auto* s = add(Command::Shoot, "integrate one radial shot");
        detail::option(s, "--p", c.p, "power source v^p");
        detail::add_pair(s, c);
        detail::add_ellipticity(s, c);
        detail::add_shot(s, c);
    }
    {
        auto* s = add(Command::Classify, "decay class of the shot with h = v^p");
        detail::option(s, "--p", c.p, "exponent");
        s->add_option_function<std::string>("--p-grid", [&c](const std::string& g) { c.p_grid = parse_grid("p_grid", g); },
                                            "lo:hi:count (linear)");
        detail::option(s, "--oscillation-decades", c.oscillation_decades, "window for pseudo-slow detection");
        detail::add_ellipticity(s, c);
        detail::add_shot(s, c);
    }
    {
        auto* s = add(Command::Critical, "bisection for the critical exponent");
        detail::add_ellipticity(s, c);
        s->add_option_function<std::string>("--bracket", [&c](const std::string& b) { c.bracket = parse_pair("bracket", b); },
                                            "lo,hi");
        detail::option(s, "--tolp", c.tolp, "bracket width");
        detail::option(s, "--rmax", c.rmax, "positivity horizon");
        detail::option(s, "--rtol", c.rtol, "relative integration tolerance");
    }
    {
        auto* s = add(Command::Constants, "dimension-like numbers and exponent thresholds");
        detail::add_ellipticity(s, c, false);
    }
    {
        auto* s = add(Command::Eigen, "first eigenvalue on a ball");
        detail::add_ellipticity(s, c);
        detail::option(s, "--R", c.R, "ball radius");
    }
    for (Command cmd : {Command::Ball, Command::Scan}) {
        auto* s = add(cmd, cmd == Command::Ball ? "positive radial Dirichlet solution on B_R"
                                                : "count solutions over an amplitude grid");
        detail::add_pair(s, c);
        detail::add_ellipticity(s, c);
        detail::option(s, "--R", c.R, "ball radius");
        detail::option(s, "--gamma", c.gamma, "decomposed source: gamma");
        detail::option(s, "--psi", c.psi, "decomposed source: psi(t)");
        detail::option(s, "--nodes", c.nodes, "profile nodes");
        detail::option(s, "--p", c.p, "growth exponent of psi at infinity (hypothesis report)");
        detail::option(s, "--pstar", c.pstar, "critical exponent to compare p against; located when absent");
        if (cmd == Command::Ball)
            s->add_option_function<std::string>("--bracket",
                                                [&c](const std::string& b) { c.bracket = parse_pair("bracket", b); },
                                                "a0,a1");
        else
            s->add_option_function<std::string>(
                "--amplitudes", [&c](const std::string& g) { c.amplitudes = parse_grid("amplitudes", g); },
                "a0:a1:k (log-spaced)");
    }
    {
        auto* s = add(Command::Verify, "randomized property suites");
        s->add_option("--suite", c.suite, "operators, lemma21 or transform")
            ->check(CLI::IsMember({"operators", "lemma21", "transform"}));
        s->add_option("--seed", c.seed, "random seed");
        s->add_option("--count", c.count, "number of random cases");
    }
    CLI::App* run_sub = app.add_subcommand("run", "execute a JSON run configuration");
    run_sub->add_option("config", config_path, "configuration file")->required();

    try {
        app.parse(argc, argv);
        if (run_sub->parsed()) {
            c = load_config(config_path);
            if (app.count("--jobs")) c.jobs = jobs;
            if (out_dir) c.out = out_dir;
            if (app.count("--format")) c.format = format;
        } else {
            for (const auto& [s, cmd] : subs)
                if (s->parsed()) c.command = cmd;
            c.jobs = jobs;
            c.out = out_dir;
            c.format = format;
        }
        validate(c);
        const Outcome o = execute_timed(c);
        emit(c, o, out);
        if (o.failed) {
            err << kToolName << ": checks failed\n";
            return 1;
        }
        return 0;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << detail::version_string() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << kToolName << ": " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    } catch (const UsageError& e) {
        err << kToolName << ": usage error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        err << kToolName << ": invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << kToolName << ": expression error at offset " << e.offset() << ": " << e.what() << "\n";
        return 2;
    } catch (const UnboundParameter& e) {
        err << kToolName << ": " << e.what() << "\n";
        return 2;
    } catch (const pucci::Error& e) {
        err << kToolName << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << kToolName << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace pucci::app
