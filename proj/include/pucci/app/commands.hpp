#pragma once

// Execution of a validated RunConfig. Each command yields run records plus
// optional companion CSV files; nothing here touches stdout.

#include "pucci/app/config.hpp"
#include "pucci/app/records.hpp"
#include "pucci/dirichlet.hpp"
#include "pucci/kk_transform.hpp"
#include "pucci/pairs.hpp"
#include "pucci/parallel.hpp"
#include "pucci/properties.hpp"
#include "pucci/radial.hpp"
#include "pucci/transform_checks.hpp"

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pucci::app {

struct Outcome {
    std::vector<RunRecord> records;
    std::vector<std::pair<std::string, std::string>> files;  ///< companion (name, contents)
    bool failed = false;  ///< a check ran but did not pass (verify)
};

namespace detail {

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// NaN and infinities are not representable in JSON; they become null.
inline json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline GradientPair resolve_pair(const RunConfig& c) {
    if (c.pair) return builtin_pair(*c.pair, c.params);
    if (c.pair_file) {
        RunConfig tmp;
        tmp.params = c.params;
        apply_pair_file(tmp, read_json_file(*c.pair_file, "pair_file"));
        return make_pair(*tmp.g, *tmp.f, tmp.params, *c.pair_file);
    }
    if (c.g && c.f) return make_pair(*c.g, *c.f, c.params);
    throw UsageError("pair", "no pair given");
}

inline bool has_pair(const RunConfig& c) { return c.pair || c.pair_file || (c.g && c.f); }

inline Ellipticity ellipticity(const RunConfig& c) {
    try {
        return Ellipticity(c.lambda, c.Lambda, c.n);
    } catch (const InvalidInput& e) {
        throw UsageError("lambda", e.what());
    }
}

inline json constants_json(const CriticalExponents& k) {
    json j;
    j["N_plus"] = k.N_plus;
    j["N_minus"] = k.N_minus;
    j["p_s_plus"] = opt(k.p_s_plus);
    j["p_p_plus"] = opt(k.p_p_plus);
    j["p_s_minus"] = opt(k.p_s_minus);
    j["p_o_minus"] = opt(k.p_o_minus);
    j["p_p_minus"] = opt(k.p_p_minus());
    j["p_star_n"] = opt(k.p_star_n);
    j["notes"] = k.notes;
    return j;
}

inline json limit_json(const LimitEstimate& l) {
    json j;
    j["value"] = std::isnan(l.value) ? json(nullptr) : (std::isinf(l.value) ? json(l.value > 0 ? "+inf" : "-inf") : json(l.value));
    j["trend"] = to_string(l.trend);
    j["samples"] = json::array();
    for (double s : l.samples) j["samples"].push_back(real(s));
    return j;
}

inline json decay_json(const DecayClass& d) {
    json j;
    j["kind"] = to_string(d.kind);
    j["R"] = d.kind == DecayKind::Crossing ? json(d.R) : json(nullptr);
    j["C"] = d.kind == DecayKind::FastDecay ? json(d.C) : json(nullptr);
    j["c_star"] = d.kind == DecayKind::SlowDecay ? json(d.c_star) : json(nullptr);
    j["C1"] = d.kind == DecayKind::PseudoSlow ? json(d.C1) : json(nullptr);
    j["C2"] = d.kind == DecayKind::PseudoSlow ? json(d.C2) : json(nullptr);
    j["alpha"] = d.alpha;
    j["N_tilde"] = d.N_tilde;
    j["fitted_exponent"] = real(d.fitted_exponent);
    j["fast_variation"] = real(d.fast_variation);
    j["slow_variation"] = real(d.slow_variation);
    j["oscillation_amplitude"] = real(d.oscillation_amplitude);
    j["persistence"] = real(d.persistence);
    j["extrema"] = d.extrema;
    j["window_samples"] = d.window_samples;
    j["window_lo"] = d.window_lo;
    j["window_hi"] = d.window_hi;
    j["diagnostics"] = d.diagnostics;
    return j;
}

inline json report_json(const PropertyReport& r) {
    json j;
    j["suite"] = r.suite;
    j["seed"] = r.seed;
    j["passed"] = r.passed();
    j["trials"] = r.total_trials();
    j["failures"] = r.total_failures();
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name}, {"trials", c.trials}, {"failures", c.failures}, {"worst", c.worst}});
    return j;
}

inline json solution_json(const RadialSolution& s) {
    json j;
    j["amplitude"] = s.amplitude;
    j["amp_lo"] = s.amp_lo;
    j["amp_hi"] = s.amp_hi;
    j["R"] = s.R;
    j["rho"] = s.rho;
    j["residual_transformed"] = s.residual_transformed;
    j["residual_original"] = s.residual_original;
    j["residual_original_all_nodes"] = s.original.sup_all;
    j["excluded_nodes"] = s.original.excluded;
    j["switching_radii"] = s.switching_radii;
    j["notes"] = s.notes;
    return j;
}

inline json hypotheses_json(const HypothesisReport& h) {
    json j;
    j["plausible"] = h.plausible();
    j["gamma"] = h.gamma;
    j["mu1"] = h.mu1;
    j["c_star"] = opt(h.c_star);
    j["eigenvalue_gap"] = h.eigenvalue_gap;
    j["p"] = opt(h.p);
    j["C_star"] = opt(h.C_star);
    j["p_star"] = opt(h.p_star);
    j["p_star_source"] = h.p_star_source;
    j["exponent_range"] = h.exponent_range;
    j["notes"] = h.notes;
    return j;
}

inline HypothesisReport hypotheses(const RunConfig& c, const BallProblem& bp) {
    HypothesisOptions ho;
    ho.p = c.p;
    ho.p_star = c.pstar;
    return check_ball_hypotheses(bp, *c.R, ho);
}

inline std::string profile_csv(const RadialSolution& s) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s.u_profile.size());
    for (const auto& p : s.u_profile) rows.push_back({p.r, p.v, p.u});
    return numeric_csv({"r", "v", "u"}, rows);
}

inline const char* kMinusCaveat =
    "for M- at p = p*- the entire solution is either a g-slow decaying or a g-pseudo-slow decaying solution; "
    "the classifier does not choose between the two";

inline ShootConfig shot_config(const RunConfig& c, const Source& src) {
    ShootConfig s;
    s.source = src;
    s.ell = ellipticity(c);
    s.sign = c.sign;
    s.amplitude = c.amplitude;
    s.r_max = shot_rmax(c);
    s.rtol = c.rtol;
    return s;
}

inline Source shot_source(const RunConfig& c, std::optional<double> p) {
    if (has_pair(c)) {
        auto table = std::make_shared<const TransformTable>(resolve_pair(c), TransformOptions{c.tol, 50.0, 700.0});
        return Source::transformed(std::move(table));
    }
    return Source::power(*p);
}

inline json trajectory_json(const Trajectory& tr) {
    json j;
    j["terminal"] = to_string(tr.terminal);
    j["r_end"] = tr.r_end;
    j["crossing"] = tr.crossing() ? json(*tr.crossing()) : json(nullptr);
    j["source"] = tr.config.source.label();
    j["samples"] = tr.samples.size();
    j["accepted"] = tr.accepted;
    j["rejected"] = tr.rejected;
    j["evaluations"] = tr.evaluations;
    j["center_curvature"] = tr.center_curvature;
    j["v_end"] = tr.samples.empty() ? json(nullptr) : json(tr.samples.back().v);
    j["residual_ratio"] = tr.residual_ratio();
    if (!tr.diagnostic.empty()) j["diagnostic"] = tr.diagnostic;
    return j;
}

inline std::string trajectory_csv(const Trajectory& tr) {
    std::vector<std::vector<double>> rows;
    rows.reserve(tr.samples.size());
    for (const auto& s : tr.samples) rows.push_back({s.r, s.v, s.dv, s.ddv});
    return numeric_csv({"r", "v", "dv", "ddv"}, rows);
}

inline BallProblem ball_problem(const RunConfig& c) {
    const auto pair = resolve_pair(c);
    SourceSpec spec = c.gamma ? SourceSpec::decomposed(*c.gamma, Expr::parse(*c.psi)) : SourceSpec::from_pair();
    return make_ball_problem(spec, pair, ellipticity(c), c.sign, std::min(c.tol, 1e-12));
}

}  // namespace detail

inline Outcome execute(const RunConfig& c) {
    validate(c);
    Outcome out;
    auto record = [&](json results) {
        RunRecord r;
        r.config = config_echo(c);
        r.results = std::move(results);
        return r;
    };

    switch (c.command) {
        case Command::Constants: {
            out.records.push_back(record(detail::constants_json(critical_constants(detail::ellipticity(c)))));
            break;
        }
        case Command::Eval: {
            json j;
            if (c.expr) {
                const Expr e = Expr::parse(*c.expr);
                j["expr"] = e.to_string();
                j["at"] = *c.at;
                j["value"] = e.bind(c.params)(*c.at);
            } else {
                const json& m = *c.matrix;
                if (!m.is_object() || !m.contains("dim") || !m.contains("upper") || !m["dim"].is_number_integer() ||
                    !m["upper"].is_array())
                    throw UsageError("matrix", "expected {\"dim\": k, \"upper\": [...]}");
                const auto dim = m["dim"].get<long long>();
                if (dim < 1 || dim > 64) throw UsageError("matrix.dim", "must lie in 1..64");
                std::vector<double> upper;
                for (const auto& x : m["upper"]) {
                    if (!x.is_number()) throw UsageError("matrix.upper", "entries must be numbers");
                    upper.push_back(x.get<double>());
                }
                const SymMatrix a(static_cast<std::size_t>(dim), std::move(upper));
                const Ellipticity ell(c.lambda, c.Lambda, static_cast<int>(dim));
                j["eigenvalues"] = eigenvalues_sym(a).eigenvalues;
                j["value"] = pucci_eval(a, ell, c.sign);
            }
            out.records.push_back(record(std::move(j)));
            break;
        }
        case Command::Transform: {
            const TransformTable table(detail::resolve_pair(c), TransformOptions{c.tol, 50.0, 700.0});
            const double x = *c.at;
            double v = 0.0;
            if (c.op == "G") v = table.G(x);
            else if (c.op == "phi") v = table.phi(x);
            else if (c.op == "phiinv") v = table.phi_inv(x);
            else v = table.h(x);
            json j;
            j["op"] = c.op;
            j["at"] = x;
            j["value"] = v;
            j["tol"] = c.tol;
            j["overflow_threshold"] = detail::opt(table.overflow_threshold());
            out.records.push_back(record(std::move(j)));
            break;
        }
        case Command::Growth: {
            const auto pair = detail::resolve_pair(c);
            double mu1 = 0.0;
            std::string source;
            if (c.mu1) {
                mu1 = *c.mu1;
                source = "given";
            } else {
                mu1 = first_eigenvalue_ball(detail::ellipticity(c), c.sign, *c.R);
                source = "first eigenvalue on B_R";
            }
            GrowthOptions go;
            go.tol = c.tol;
            go.p = c.p;
            go.gamma = c.gamma;
            const auto rep = classify_growth(pair, mu1, go);
            json j;
            j["growth"] = to_string(rep.growth);
            j["mu1"] = mu1;
            j["mu1_source"] = source;
            j["at_zero"] = detail::limit_json(rep.at_zero);
            j["at_infinity"] = detail::limit_json(rep.at_infinity);
            j["c_star"] = detail::opt(rep.c_star);
            j["C_star"] = detail::opt(rep.C_star);
            j["power_ratio"] = rep.power_ratio ? detail::limit_json(*rep.power_ratio) : json(nullptr);
            j["f_at_zero"] = rep.f_at_zero;
            j["max_lower_bound_violation"] = detail::opt(rep.max_lower_bound_violation);
            j["heuristic"] = rep.heuristic;
            j["notes"] = rep.notes;
            out.records.push_back(record(std::move(j)));
            break;
        }
        case Command::Shoot: {
            const auto tr = integrate_shoot(detail::shot_config(c, detail::shot_source(c, c.p)));
            out.records.push_back(record(detail::trajectory_json(tr)));
            out.files.emplace_back("trajectory.csv", detail::trajectory_csv(tr));
            break;
        }
        case Command::Classify: {
            const std::vector<double> ps = c.p_grid ? c.p_grid->linear() : std::vector<double>{*c.p};
            const auto consts = critical_constants(detail::ellipticity(c));
            DecayOptions dopts;
            dopts.oscillation_decades = c.oscillation_decades;
            auto run = [&](double p) {
                RunConfig one = c;
                one.p = p;
                one.p_grid.reset();
                const auto tr = integrate_shoot(detail::shot_config(one, detail::shot_source(one, p)));
                json j = detail::decay_json(classify_decay(tr, p, consts, dopts));
                j["terminal"] = to_string(tr.terminal);
                if (c.sign == OperatorSign::Minus) j["caveat"] = detail::kMinusCaveat;
                RunRecord r;
                r.config = config_echo(one);
                r.results = std::move(j);
                return r;
            };
            out.records = parallel_map(ps, run, c.jobs);
            break;
        }
        case Command::Critical: {
            const Ellipticity ell = detail::ellipticity(c);
            CriticalSearch cs;
            cs.bracket = c.bracket;
            cs.tol_p = c.tolp;
            cs.r_max = critical_rmax(c);
            cs.rtol = c.rtol;
            const auto res = find_critical_p(ell, c.sign, cs);
            auto consts = critical_constants(ell);
            json j;
            j["p_star"] = res.p_star;
            j["lo"] = res.lo;
            j["hi"] = res.hi;
            j["bracket_width"] = res.hi - res.lo;
            j["iterations"] = res.iterations;
            j["r_max"] = res.r_max;
            j["rtol"] = res.rtol;
            j["constants"] = detail::constants_json(consts);
            if (c.sign == OperatorSign::Plus && consts.p_s_plus) {
                const double lower = std::max(*consts.p_s_plus, consts.p_star_n.value_or(*consts.p_s_plus));
                j["expected_range"] = {lower, *consts.p_p_plus};
                j["inside_expected_range"] = res.p_star > lower && res.p_star < *consts.p_p_plus;
            } else if (c.sign == OperatorSign::Minus && consts.p_o_minus && consts.p_star_n) {
                const double lower = std::max(*consts.p_s_minus, *consts.p_o_minus);
                j["expected_range"] = {lower, *consts.p_star_n};
                j["inside_expected_range"] = res.p_star > lower && res.p_star < *consts.p_star_n;
                j["caveat"] = detail::kMinusCaveat;
            }
            out.records.push_back(record(std::move(j)));
            break;
        }
        case Command::Eigen: {
            const auto res = first_eigenvalue_search(detail::ellipticity(c), c.sign, *c.R);
            out.records.push_back(record({{"mu", res.mu}, {"lo", res.lo}, {"hi", res.hi},
                                          {"iterations", res.iterations}, {"R", *c.R}}));
            break;
        }
        case Command::Ball: {
            const auto bp = detail::ball_problem(c);
            BallOptions bo;
            bo.jobs = c.jobs;
            bo.profile_nodes = c.nodes;
            const auto sol = solve_ball(bp, *c.R, c.bracket, bo);
            json j = detail::solution_json(sol);
            j["hypotheses"] = detail::hypotheses_json(detail::hypotheses(c, bp));
            out.records.push_back(record(std::move(j)));
            out.files.emplace_back("profile.csv", detail::profile_csv(sol));
            break;
        }
        case Command::Scan: {
            const auto bp = detail::ball_problem(c);
            BallOptions bo;
            bo.jobs = c.jobs;
            bo.profile_nodes = c.nodes;
            const auto scan = uniqueness_scan(bp, *c.R, c.amplitudes->geometric(), bo);
            json j;
            j["samples"] = json::array();
            for (const auto& [a, rho] : scan.samples) j["samples"].push_back({a, detail::opt(rho)});
            j["sign_changes"] = scan.sign_changes;
            j["degenerate"] = scan.degenerate;
            j["rho_variation"] = scan.rho_variation;
            j["solutions"] = json::array();
            for (std::size_t i = 0; i < scan.solutions.size(); ++i) {
                j["solutions"].push_back(detail::solution_json(scan.solutions[i]));
                out.files.emplace_back("profile_" + std::to_string(i) + ".csv", detail::profile_csv(scan.solutions[i]));
            }
            j["notes"] = scan.notes;
            j["hypotheses"] = detail::hypotheses_json(detail::hypotheses(c, bp));
            out.records.push_back(record(std::move(j)));
            break;
        }
        case Command::Verify: {
            PropertyReport rep;
            if (c.suite == "operators") rep = check_operator_properties(c.seed, c.count);
            else if (c.suite == "lemma21") rep = check_gradient_identity(c.seed, c.count);
            else rep = check_transform_properties(c.seed, std::min(c.count, 200));
            out.failed = !rep.passed();
            out.records.push_back(record(detail::report_json(rep)));
            break;
        }
    }
    return out;
}

/// execute() with wall-clock durations filled in.
inline Outcome execute_timed(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = execute(c);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : o.records) r.duration_s = dt;
    return o;
}

}  // namespace pucci::app
