#pragma once

// Positive radial solutions of the Dirichlet problem on B_R by amplitude
// shooting in the transformed variable v = phi_g(u), mapped back through
// u = phi_g^{-1}(v) and checked against the original gradient equation
//   M(D^2 u + g(u) grad u (x) grad u) + f(u) = 0.

#include "pucci/error.hpp"
#include "pucci/kk_transform.hpp"
#include "pucci/pairs.hpp"
#include "pucci/parallel.hpp"
#include "pucci/pucci_core.hpp"
#include "pucci/radial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pucci {

/// Where the right-hand side f of the original equation comes from.
struct SourceSpec {
    enum class Kind {
        FromPair,    ///< f of the gradient pair
        Autonomous,  ///< f given separately
        Decomposed,  ///< f = -gamma phi_g e^{-G} + psi
        Direct,      ///< h given in the transformed variable
    };

    Kind kind = Kind::FromPair;
    Expr f;
    double gamma = 0.0;
    Expr psi;
    std::function<double(double)> h;
    std::string label;

    static SourceSpec from_pair() { return {}; }

    static SourceSpec autonomous(Expr f) {
        SourceSpec s;
        s.kind = Kind::Autonomous;
        s.label = "f=" + f.source();
        s.f = std::move(f);
        return s;
    }

    static SourceSpec decomposed(double gamma, Expr psi) {
        if (!(gamma >= 0.0)) throw InvalidInput("decomposed source requires gamma >= 0");
        SourceSpec s;
        s.kind = Kind::Decomposed;
        s.gamma = gamma;
        s.label = "gamma=" + detail::format_number(gamma) + "; psi=" + psi.source();
        s.psi = std::move(psi);
        return s;
    }

    static SourceSpec direct(std::function<double(double)> h, std::string label) {
        SourceSpec s;
        s.kind = Kind::Direct;
        s.h = std::move(h);
        s.label = std::move(label);
        return s;
    }
};

/// A fully assembled ball problem: transform table, transformed source h and
/// the original f, shared by every shot.
struct BallProblem {
    GradientPair pair;
    SourceSpec spec;
    Ellipticity ell{1.0, 1.0, 3};
    OperatorSign sign = OperatorSign::Plus;
    std::shared_ptr<const TransformTable> table;
    Source h;
    std::function<double(double)> f;  ///< f(t) of the original equation
    std::function<double(double)> g;
};

inline BallProblem make_ball_problem(const SourceSpec& spec, const GradientPair& pair,
                                     const Ellipticity& ell, OperatorSign sign,
                                     double transform_tol = 1e-12) {
    BallProblem bp;
    bp.pair = pair;
    bp.spec = spec;
    bp.ell = ell;
    bp.sign = sign;
    auto table = std::make_shared<const TransformTable>(pair, TransformOptions{transform_tol, 50.0, 700.0});
    bp.table = table;
    const BoundExpr g = pair.bound_g();
    bp.g = [g](double t) { return g(t); };

    switch (spec.kind) {
        case SourceSpec::Kind::FromPair: {
            bp.h = Source::transformed(table);
            const BoundExpr f = pair.bound_f();
            bp.f = [f](double t) { return f(t); };
            break;
        }
        case SourceSpec::Kind::Autonomous: {
            const BoundExpr f = spec.f.bind(pair.params);
            bp.f = [f](double t) { return f(t); };
            bp.h = Source::function(
                [table, f](double s) {
                    const auto pt = table->locate(s);
                    return std::exp(pt.G) * f(pt.t);
                },
                spec.label);
            break;
        }
        case SourceSpec::Kind::Decomposed: {
            const BoundExpr psi = spec.psi.bind(pair.params);
            for (double t : nonnegativity_grid()) {
                if (t > 50.0) break;
                const double v = psi(t);
                if (!(v >= 0.0))
                    throw InvalidInput("psi must be non-negative; psi(" + detail::format_number(t) +
                                       ") = " + detail::format_number(v));
            }
            const double gamma = spec.gamma;
            bp.f = [table, psi, gamma](double t) {
                const auto pt = table->at(t);
                return -gamma * pt.phi * std::exp(-pt.G) + psi(t);
            };
            bp.h = Source::function(
                [table, psi, gamma](double s) {
                    const auto pt = table->locate(s);
                    return -gamma * s + std::exp(pt.G) * psi(pt.t);
                },
                spec.label);
            break;
        }
        case SourceSpec::Kind::Direct: {
            if (!spec.h) throw InvalidInput("direct source without h");
            auto h = spec.h;
            bp.h = Source::function(h, spec.label);
            bp.f = [table, h](double t) {
                const auto pt = table->at(t);
                return std::exp(-pt.G) * h(pt.phi);
            };
            break;
        }
    }
    return bp;
}

struct BallOptions {
    double scan_rtol = 1e-10;    ///< shots used to evaluate rho(a) on grids
    double solve_rtol = 1e-12;   ///< bisection and final profile
    double max_step_fraction = 2e-3;  ///< solve shots cap the step at this fraction of R so
                                      ///< the dense output stays accurate under 1/dr^2
    double r_max_factor = 2.0;   ///< shots stop at factor * R; no zero counts as rho = +inf
    double radius_tol = 1e-10;   ///< bisection stops once |rho - R| <= radius_tol * R
    int profile_nodes = 4000;
    bool exclude_switching = true;  ///< skip FD stencils straddling a kink of v'''
    unsigned jobs = 1;
};

/// First zero of the transformed shot, or nullopt when v stays positive up to r_max.
inline std::optional<double> crossing_radius(const BallProblem& bp, double amplitude, double r_max,
                                             double rtol = 1e-10,
                                             double max_step = std::numeric_limits<double>::infinity()) {
    ShootConfig cfg;
    cfg.max_step = max_step;
    cfg.source = bp.h;
    cfg.ell = bp.ell;
    cfg.sign = bp.sign;
    cfg.amplitude = amplitude;
    cfg.r_max = r_max;
    cfg.rtol = rtol;
    const auto tr = integrate_shoot(cfg);
    if (tr.terminal == Terminal::StepFailure)
        throw Error("shot at amplitude " + detail::format_number(amplitude) + " failed: " + tr.diagnostic);
    return tr.crossing();
}

inline std::optional<double> crossing_radius(const SourceSpec& spec, const GradientPair& pair,
                                             const Ellipticity& ell, OperatorSign sign, double amplitude,
                                             double r_max = 1e4) {
    return crossing_radius(make_ball_problem(spec, pair, ell, sign), amplitude, r_max);
}

// ---------------------------------------------------------------------------
// Finite-difference residual of the original equation

struct ResidualReport {
    double sup = 0.0;      ///< over nodes kept
    double sup_all = 0.0;  ///< over every node
    double worst_r = 0.0;
    int evaluated = 0;
    int excluded = 0;
};

/// Residual of M(diag(u'' + g(u) u'^2, u'/r, ..., u'/r)) + f(u) with centered
/// second-order differences inside, one-sided second-order stencils at r = R
/// and the symmetric limit n w(u''(0)) + f(u(0)) at the centre. Nodes whose
/// stencil contains one of `switching` are left out of `sup`.
inline ResidualReport fd_residual(std::span<const double> r, std::span<const double> u,
                                  const std::function<double(double)>& g,
                                  const std::function<double(double)>& f, const Ellipticity& ell,
                                  OperatorSign sign, std::span<const double> switching = {}) {
    const std::size_t N = r.size();
    if (N < 100) throw InvalidInput("residual grid needs at least 100 nodes");
    if (u.size() != N) throw InvalidInput("profile and grid sizes differ");
    const double dr = (r[N - 1] - r[0]) / static_cast<double>(N - 1);
    if (r[0] != 0.0 || !(dr > 0.0)) throw InvalidInput("residual grid must be uniform from r = 0");
    for (std::size_t i = 1; i < N; ++i)
        if (std::abs(r[i] - r[i - 1] - dr) > 1e-9 * dr)
            throw InvalidInput("residual grid must be uniform");

    auto straddles = [&](double a, double b) {
        return std::any_of(switching.begin(), switching.end(),
                           [&](double s) { return s >= a && s <= b; });
    };
    ResidualReport rep;
    auto account = [&](std::size_t i, double res, bool skip) {
        res = std::abs(res);
        ++rep.evaluated;
        rep.sup_all = std::max(rep.sup_all, res);
        if (skip) {
            ++rep.excluded;
            return;
        }
        if (res > rep.sup) {
            rep.sup = res;
            rep.worst_r = r[i];
        }
    };
    const double h2 = dr * dr;
    const int n = ell.n();
    {
        const double upp = 2.0 * (u[1] - u[0]) / h2;
        account(0, n * weighting(upp, ell, sign) + f(u[0]), straddles(0.0, r[1]));
    }
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double up = (u[i + 1] - u[i - 1]) / (2.0 * dr);
        const double upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
        const double radial = upp + g(u[i]) * up * up;
        const double res = weighting(radial, ell, sign) + (n - 1) * weighting(up / r[i], ell, sign) + f(u[i]);
        account(i, res, straddles(r[i - 1], r[i + 1]));
    }
    {
        const std::size_t k = N - 1;
        const double up = (3.0 * u[k] - 4.0 * u[k - 1] + u[k - 2]) / (2.0 * dr);
        const double upp = (2.0 * u[k] - 5.0 * u[k - 1] + 4.0 * u[k - 2] - u[k - 3]) / h2;
        const double radial = upp + g(u[k]) * up * up;
        const double res = weighting(radial, ell, sign) + (n - 1) * weighting(up / r[k], ell, sign) + f(u[k]);
        account(k, res, straddles(r[k - 3], r[k]));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ball solutions

struct ProfilePoint {
    double r;
    double v;
    double u;
};

struct RadialSolution {
    double R = 0.0;
    double rho = 0.0;  ///< located zero of v, |rho - R| <= radius_tol * R
    double amplitude = 0.0;
    double amp_lo = 0.0;
    double amp_hi = 0.0;
    Trajectory v_profile;
    std::vector<ProfilePoint> u_profile;  ///< uniform grid on [0, rho]
    std::vector<double> switching_radii;  ///< where v'' or v' changes sign
    double residual_transformed = 0.0;
    double residual_original = 0.0;
    ResidualReport original;
    std::vector<std::string> notes;
};

namespace detail {

inline std::vector<double> switching_radii(const Trajectory& tr) {
    std::vector<double> out;
    const auto& s = tr.samples;
    auto refine = [&](double a, double b, auto&& fn) {
        const double fa = fn(a);
        for (int i = 0; i < 100 && b - a > 1e-14 * b; ++i) {
            const double m = 0.5 * (a + b);
            ((fn(m) > 0.0) == (fa > 0.0) ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i - 1].ddv > 0.0) != (s[i].ddv > 0.0))
            out.push_back(refine(s[i - 1].r, s[i].r, [&](double r) { return tr.at(r).ddv; }));
        if ((s[i - 1].dv > 0.0) != (s[i].dv > 0.0) && s[i - 1].dv != 0.0)
            out.push_back(refine(s[i - 1].r, s[i].r, [&](double r) { return tr.at(r).dv; }));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Builds the profiles and both residuals for a shot that crosses zero.
inline RadialSolution assemble_solution(const BallProblem& bp, double R, Trajectory tr,
                                        const BallOptions& opts, int nodes) {
    if (tr.terminal != Terminal::CrossedZero) throw Error("assemble_solution: shot does not cross zero");
    RadialSolution sol;
    sol.R = R;
    sol.rho = tr.r_end;
    sol.amplitude = tr.config.amplitude;
    sol.switching_radii = detail::switching_radii(tr);

    const std::size_t N = static_cast<std::size_t>(nodes);
    std::vector<double> rs(N), us(N);
    const double dr = sol.rho / static_cast<double>(N - 1);
    double res_t = 0.0;
    bool positive = true;
    const Ellipticity& ell = bp.ell;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = i + 1 == N ? sol.rho : dr * static_cast<double>(i);
        rs[i] = r;
        double v = 0.0;
        if (i + 1 < N) {
            const auto st = tr.at(r);
            v = st.v;
            if (r > 0.0) {
                const double ddv = tr.interpolant_curvature(r);
                res_t = std::max(res_t, std::abs(weighting(ddv, ell, bp.sign) +
                                                 (ell.n() - 1) * weighting(st.dv / r, ell, bp.sign) +
                                                 bp.h(v)));
            }
            if (!(v > 0.0)) positive = false;
        }
        const double u = v > 0.0 ? bp.table->phi_inv(v) : 0.0;
        us[i] = u;
        sol.u_profile.push_back({r, v, u});
    }
    if (!positive) sol.notes.push_back("v is not strictly positive on [0, R) at every node");
    sol.residual_transformed = res_t;
    const std::vector<double> none;
    sol.original = fd_residual(rs, us, bp.g, bp.f, ell, bp.sign,
                               opts.exclude_switching ? std::span<const double>(sol.switching_radii)
                                                      : std::span<const double>(none));
    sol.residual_original = sol.original.sup;
    sol.v_profile = std::move(tr);
    return sol;
}

/// Recomputes the original-equation residual of a solution on a different grid.
inline ResidualReport residual_original(const RadialSolution& sol, const BallProblem& bp, int nodes,
                                        bool exclude_switching = true) {
    if (nodes < 100) throw InvalidInput("residual grid needs at least 100 nodes");
    const std::size_t N = static_cast<std::size_t>(nodes);
    std::vector<double> rs(N), us(N);
    const double dr = sol.rho / static_cast<double>(N - 1);
    for (std::size_t i = 0; i < N; ++i) {
        rs[i] = i + 1 == N ? sol.rho : dr * static_cast<double>(i);
        const double v = i + 1 == N ? 0.0 : sol.v_profile.at(rs[i]).v;
        us[i] = v > 0.0 ? bp.table->phi_inv(v) : 0.0;
    }
    const std::vector<double> none;
    return fd_residual(rs, us, bp.g, bp.f, bp.ell, bp.sign,
                       exclude_switching ? std::span<const double>(sol.switching_radii)
                                         : std::span<const double>(none));
}

/// Residual of a given profile (r uniform from 0) for a pair (g, f).
inline double residual_original(std::span<const double> r, std::span<const double> u, const GradientPair& pair,
                                const Ellipticity& ell, OperatorSign sign) {
    const BoundExpr g = pair.bound_g(), f = pair.bound_f();
    return fd_residual(r, u, [&](double t) { return g(t); }, [&](double t) { return f(t); }, ell, sign).sup;
}

inline std::vector<double> default_amplitude_grid(int count = 21, double lo = 1e-2, double hi = 1e2) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

namespace detail {

using RhoSample = std::pair<double, std::optional<double>>;

inline double rho_or_inf(const std::optional<double>& r) {
    return r ? *r : std::numeric_limits<double>::infinity();
}

inline std::string describe_samples(const std::vector<RhoSample>& s) {
    std::string out;
    for (const auto& [a, r] : s) {
        if (!out.empty()) out += ", ";
        out += "(" + format_number(a) + ", " + (r ? format_number(*r) : std::string("none")) + ")";
    }
    return out;
}

inline std::vector<RhoSample> sample_rho(const BallProblem& bp, const std::vector<double>& amps, double r_max,
                                         double rtol, unsigned jobs) {
    auto rhos = parallel_map(amps, [&](double a) { return crossing_radius(bp, a, r_max, rtol); }, jobs);
    std::vector<RhoSample> out;
    for (std::size_t i = 0; i < amps.size(); ++i) out.emplace_back(amps[i], rhos[i]);
    return out;
}

}  // namespace detail

/// Plausibility of the existence hypotheses for f = -gamma phi e^-G + psi,
/// written in terms of hbar(s) = e^G psi at t = phi^{-1}(s):
///   hbar(s)/s -> c* at 0 with c* - gamma < mu1, and hbar(s)/s^p -> C* > 0
///   at infinity for some 1 < p < p*. Sampled limits, not a proof.
struct HypothesisOptions {
    std::optional<double> p;       ///< growth exponent at infinity; unchecked when absent
    std::optional<double> p_star;  ///< supplied critical exponent; located when absent
    CriticalSearch search;         ///< used only when p_star is absent
    int k_max = 6;                 ///< samples s = 10^{+-k}, k = 1..k_max
};

struct HypothesisReport {
    double gamma = 0.0;
    double mu1 = 0.0;
    LimitEstimate at_zero;                 ///< hbar(s)/s as s -> 0
    std::optional<double> c_star;
    bool eigenvalue_gap = false;           ///< c* - gamma < mu1
    std::optional<double> p;
    std::optional<LimitEstimate> at_infinity;  ///< hbar(s)/s^p as s -> infinity
    std::optional<double> C_star;
    std::optional<double> p_star;
    std::string p_star_source;             ///< "supplied", "located" or "unavailable"
    bool exponent_range = false;           ///< 1 < p < p*
    std::vector<std::string> notes;

    bool plausible() const { return eigenvalue_gap && exponent_range && C_star && *C_star > 0.0; }
};

inline HypothesisReport check_ball_hypotheses(const BallProblem& bp, double R, const HypothesisOptions& opts = {}) {
    HypothesisReport rep;
    rep.mu1 = first_eigenvalue_ball(bp.ell, bp.sign, R);

    // c* - gamma = lim h(s)/s for any split of f, so sample h itself
    std::vector<double> zero_seq;
    for (int k = 1; k <= opts.k_max; ++k) {
        const double s = std::pow(10.0, -k);
        zero_seq.push_back(bp.h(s) / s);
    }
    const LimitEstimate h_zero = estimate_limit(zero_seq);
    std::optional<double> slope;
    if (h_zero.trend == Trend::Converged) slope = h_zero.value;
    if (h_zero.trend == Trend::Vanishing) slope = 0.0;

    if (bp.spec.kind == SourceSpec::Kind::Decomposed) {
        rep.gamma = bp.spec.gamma;
    } else if (slope) {
        rep.gamma = std::max(0.0, -*slope);
        if (rep.gamma > 0.0) rep.notes.push_back("gamma inferred as -lim h(s)/s = " + detail::format_number(rep.gamma));
    }
    auto hbar = [&](double s) { return bp.h(s) + rep.gamma * s; };
    rep.at_zero = h_zero;
    for (auto& v : rep.at_zero.samples) v += rep.gamma;
    if (slope) rep.c_star = *slope + rep.gamma;
    if (rep.c_star && *rep.c_star < -1e-12) rep.notes.push_back("c* is negative: psi >= 0 fails near 0");
    rep.eigenvalue_gap = slope && *slope < rep.mu1;
    if (!slope) rep.notes.push_back("h(s)/s has no sampled limit at 0");

    if (opts.p_star) {
        rep.p_star = opts.p_star;
        rep.p_star_source = "supplied";
    } else {
        try {
            rep.p_star = find_critical_p(bp.ell, bp.sign, opts.search).p_star;
            rep.p_star_source = "located";
        } catch (const Error& e) {
            rep.p_star_source = "unavailable";
            rep.notes.push_back(std::string("critical exponent unavailable: ") + e.what());
        }
    }

    if (!opts.p) {
        rep.notes.push_back("growth exponent p not given; the exponent hypothesis is unchecked");
        return rep;
    }
    const double p = *opts.p;
    rep.p = p;
    std::vector<double> inf_seq;
    for (int k = 1; k <= opts.k_max; ++k) {
        const double s = std::pow(10.0, k);
        try {
            inf_seq.push_back(hbar(s) / std::pow(s, p));
        } catch (const Error&) {
            rep.notes.push_back("transform range ends before s = " + detail::format_number(s));
            break;
        }
    }
    rep.at_infinity = estimate_limit(inf_seq);
    if (rep.at_infinity->trend == Trend::Converged) rep.C_star = rep.at_infinity->value;
    else rep.notes.push_back("hbar(s)/s^p has no positive sampled limit at infinity");
    rep.exponent_range = p > 1.0 && rep.p_star && p < *rep.p_star;
    return rep;
}

/// Finds a with rho(a) = R by bisection inside `bracket` (amplitudes whose
/// rho - R differ in sign; no crossing counts as +inf).
inline RadialSolution solve_ball(const BallProblem& bp, double R, std::optional<std::pair<double, double>> bracket,
                                 const BallOptions& opts = {}) {
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("ball radius must be positive");
    const double r_max = opts.r_max_factor * R;
    const double max_step = opts.max_step_fraction * R;
    auto rho = [&](double a) { return crossing_radius(bp, a, r_max, opts.solve_rtol, max_step); };
    double lo = 0.0, hi = 0.0;
    if (bracket) {
        lo = bracket->first;
        hi = bracket->second;
        if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("amplitude bracket must satisfy 0 < lo < hi");
    } else {
        const auto samples = detail::sample_rho(bp, default_amplitude_grid(), r_max, opts.scan_rtol, opts.jobs);
        bool found = false;
        for (std::size_t i = 1; i < samples.size() && !found; ++i) {
            const double d0 = detail::rho_or_inf(samples[i - 1].second) - R;
            const double d1 = detail::rho_or_inf(samples[i].second) - R;
            if ((d0 > 0.0) != (d1 > 0.0)) {
                lo = samples[i - 1].first;
                hi = samples[i].first;
                found = true;
            }
        }
        if (!found)
            throw BracketError("no amplitude with rho(a) = " + detail::format_number(R) +
                               " found; sampled (a, rho(a)): " + detail::describe_samples(samples));
    }
    const double d_lo = detail::rho_or_inf(rho(lo)) - R;
    const double d_hi = detail::rho_or_inf(rho(hi)) - R;
    if ((d_lo > 0.0) == (d_hi > 0.0))
        throw BracketError("amplitude bracket does not straddle R: rho(" + detail::format_number(lo) +
                           ") - R = " + detail::format_number(d_lo) + ", rho(" + detail::format_number(hi) +
                           ") - R = " + detail::format_number(d_hi));
    const bool lo_outside = d_lo > 0.0;
    double a = std::sqrt(lo * hi);
    for (int it = 0; it < 200; ++it) {
        a = std::sqrt(lo * hi);
        const double d = detail::rho_or_inf(rho(a)) - R;
        if (std::abs(d) <= opts.radius_tol * R) break;
        if ((d > 0.0) == lo_outside)
            lo = a;
        else
            hi = a;
        if (hi - lo <= 1e-15 * hi) break;
    }
    ShootConfig cfg;
    cfg.source = bp.h;
    cfg.ell = bp.ell;
    cfg.sign = bp.sign;
    cfg.amplitude = a;
    cfg.r_max = r_max;
    cfg.rtol = opts.solve_rtol;
    cfg.max_step = max_step;
    auto tr = integrate_shoot(cfg);
    if (tr.terminal != Terminal::CrossedZero)
        throw Error("final shot at amplitude " + detail::format_number(a) + " does not cross zero");
    RadialSolution sol = assemble_solution(bp, R, std::move(tr), opts, opts.profile_nodes);
    sol.amp_lo = std::min(lo, hi);
    sol.amp_hi = std::max(lo, hi);
    if (std::abs(sol.rho - R) > opts.radius_tol * R)
        sol.notes.push_back("bisection stopped with |rho - R| = " + detail::format_number(std::abs(sol.rho - R)));
    return sol;
}

inline RadialSolution solve_ball(const SourceSpec& spec, const GradientPair& pair, const Ellipticity& ell,
                                 OperatorSign sign, double R,
                                 std::optional<std::pair<double, double>> bracket = std::nullopt,
                                 const BallOptions& opts = {}) {
    return solve_ball(make_ball_problem(spec, pair, ell, sign), R, bracket, opts);
}

// ---------------------------------------------------------------------------
// Uniqueness scan

struct ScanResult {
    double R = 0.0;
    std::vector<detail::RhoSample> samples;  ///< (a, rho(a)); nullopt = no zero before r_max
    int sign_changes = 0;
    bool degenerate = false;      ///< rho(a) constant in a (homogeneous source)
    double rho_variation = 0.0;   ///< (max - min) / mean over finite rho
    std::vector<RadialSolution> solutions;
    std::vector<std::string> notes;
};

/// Counts sign changes of rho(a) - R over a log-spaced amplitude grid and
/// refines each into a solution. A continuum (rho independent of a) is
/// reported as degenerate instead of as many isolated solutions.
inline ScanResult uniqueness_scan(const BallProblem& bp, double R, const std::vector<double>& amps,
                                  const BallOptions& opts = {}) {
    if (!(R > 0.0)) throw InvalidInput("ball radius must be positive");
    if (amps.size() < 20) throw InvalidInput("amplitude grid needs at least 20 points");
    for (std::size_t i = 1; i < amps.size(); ++i)
        if (!(amps[i] > amps[i - 1])) throw InvalidInput("amplitude grid must be strictly increasing");
    if (!(amps.front() > 0.0) || amps.front() > 1e-2 || amps.back() < 1e2)
        throw InvalidInput("amplitude grid must span at least [1e-2, 1e2]");

    ScanResult out;
    out.R = R;
    out.samples = detail::sample_rho(bp, amps, opts.r_max_factor * R, opts.scan_rtol, opts.jobs);

    std::vector<double> finite;
    for (const auto& s : out.samples)
        if (s.second) finite.push_back(*s.second);
    if (finite.size() == out.samples.size()) {
        const auto [mn, mx] = std::minmax_element(finite.begin(), finite.end());
        double mean = 0.0;
        for (double x : finite) mean += x;
        mean /= static_cast<double>(finite.size());
        out.rho_variation = (*mx - *mn) / mean;
        if (out.rho_variation < 1e-10) {
            out.degenerate = true;
            out.notes.push_back(std::abs(mean - R) <= 1e-8 * R
                                    ? "rho(a) is constant and equals R: a continuum of solutions (homogeneous source)"
                                    : "rho(a) is constant and differs from R: no solution at any amplitude");
            return out;
        }
    }

    std::vector<std::pair<double, double>> brackets;
    for (std::size_t i = 1; i < out.samples.size(); ++i) {
        const double d0 = detail::rho_or_inf(out.samples[i - 1].second) - R;
        const double d1 = detail::rho_or_inf(out.samples[i].second) - R;
        if ((d0 > 0.0) != (d1 > 0.0)) brackets.emplace_back(out.samples[i - 1].first, out.samples[i].first);
    }
    out.sign_changes = static_cast<int>(brackets.size());
    BallOptions inner = opts;
    inner.jobs = 1;
    out.solutions = parallel_map(
        brackets, [&](const std::pair<double, double>& b) { return solve_ball(bp, R, b, inner); }, opts.jobs);
    return out;
}

}  // namespace pucci
