#pragma once

// Radial Pucci equations by shooting:
//   M(D^2 v) + h(v) = 0,  v(0) = a, v'(0) = 0,
// which for radial v reads  w(v'') + (n-1) w(v'/r) + h(v) = 0  with w the
// one-eigenvalue weighting. Also: decay classification of entire solutions,
// critical exponents for h(v) = v^p and the first eigenvalue on balls.

#include "pucci/error.hpp"
#include "pucci/kk_transform.hpp"
#include "pucci/ode.hpp"
#include "pucci/parallel.hpp"
#include "pucci/pucci_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pucci {

// ---------------------------------------------------------------------------
// Exponent constants

struct CriticalExponents {
    double N_plus = 0.0;
    double N_minus = 0.0;
    std::optional<double> p_s_plus;   ///< present iff N_plus > 2
    std::optional<double> p_p_plus;   ///< present iff N_plus > 2
    std::optional<double> p_s_minus;  ///< present iff N_minus > 2
    std::optional<double> p_o_minus;  ///< present iff N_minus > 2
    std::optional<double> p_star_n;   ///< (n+2)/(n-2), present iff n >= 3
    std::optional<double> p_star_located;
    std::optional<double> bracket_width;
    std::vector<std::string> notes;

    /// Upper end of the Minus critical range; equals p_star_n.
    std::optional<double> p_p_minus() const { return p_star_n; }
};

inline CriticalExponents critical_constants(const Ellipticity& ell) {
    CriticalExponents c;
    const double ratio = ell.lambda() / ell.Lambda();
    const double n1 = ell.n() - 1;
    c.N_plus = ratio * n1 + 1.0;
    c.N_minus = n1 / ratio + 1.0;
    if (c.N_plus > 2.0) {
        c.p_s_plus = c.N_plus / (c.N_plus - 2.0);
        c.p_p_plus = (c.N_plus + 2.0) / (c.N_plus - 2.0);
    } else {
        c.notes.push_back("N_plus <= 2: p_s_plus and p_p_plus are undefined");
    }
    if (c.N_minus > 2.0) {
        c.p_s_minus = c.N_minus / (c.N_minus - 2.0);
        c.p_o_minus = (c.N_minus + 2.0) / (c.N_minus - 2.0);
    } else {
        c.notes.push_back("N_minus <= 2: p_s_minus and p_o_minus are undefined");
    }
    if (ell.n() >= 3)
        c.p_star_n = (ell.n() + 2.0) / (ell.n() - 2.0);
    else
        c.notes.push_back("n < 3: the Sobolev exponent (n+2)/(n-2) is undefined");
    return c;
}

/// Dimension-like number used for the operator of the given sign.
inline double dimension_like(const CriticalExponents& c, OperatorSign s) {
    return s == OperatorSign::Plus ? c.N_plus : c.N_minus;
}

// ---------------------------------------------------------------------------
// Radial right-hand side

/// v'' from the radial equation. At r = 0 symmetry forces v' = 0 and every
/// Hessian eigenvalue equals v''(0), so n w(v'') = -h.
inline double radial_rhs(double r, double v, double vp, double h_of_v, const Ellipticity& ell,
                         OperatorSign s) {
    (void)v;
    if (r < 0.0 || std::isnan(r)) throw InvalidInput("radial_rhs: r must be >= 0");
    if (r == 0.0) {
        if (vp != 0.0) throw InvalidInput("radial_rhs: v'(0) must vanish at r = 0");
        return invert_pucci_1d(-h_of_v / ell.n(), ell, s);
    }
    return invert_pucci_1d(-h_of_v - (ell.n() - 1) * weighting(vp / r, ell, s), ell, s);
}

/// The nonlinearity h(v) of the shooting problem. Values at v < 0 (reached
/// only inside Runge-Kutta stages next to a zero) use the odd extension.
class Source {
public:
    enum class Kind { PurePower, Transformed, Function };

    Source() : Source(power(2.0)) {}

    static Source power(double p) {
        if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("power source requires p > 1");
        Source s(Kind::PurePower, "v^" + detail::format_number(p));
        s.p_ = p;
        return s;
    }

    static Source transformed(std::shared_ptr<const TransformTable> table) {
        if (!table) throw InvalidInput("transformed source needs a table");
        Source s(Kind::Transformed, "h from " + table->pair().label);
        s.table_ = std::move(table);
        return s;
    }

    /// h given directly for v >= 0.
    static Source function(std::function<double(double)> h, std::string label) {
        if (!h) throw InvalidInput("function source is empty");
        Source s(Kind::Function, std::move(label));
        s.fn_ = std::move(h);
        return s;
    }

    static Source linear(double mu) {
        Source s = function([mu](double v) { return mu * v; }, detail::format_number(mu) + "*v");
        s.linear_ = mu;
        return s;
    }

    Kind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    std::optional<double> exponent() const {
        return kind_ == Kind::PurePower ? std::optional<double>(p_) : std::nullopt;
    }
    std::optional<double> linear_coefficient() const { return linear_; }
    const std::shared_ptr<const TransformTable>& table() const noexcept { return table_; }

    double operator()(double v) const {
        if (v < 0.0) return -positive(-v);
        return positive(v);
    }

private:
    Source(Kind k, std::string label) : kind_(k), label_(std::move(label)) {}

    double positive(double v) const {
        switch (kind_) {
            case Kind::PurePower: return std::pow(v, p_);
            case Kind::Transformed: return table_->h(v);
            case Kind::Function: return fn_(v);
        }
        return 0.0;
    }

    Kind kind_;
    std::string label_;
    double p_ = 0.0;
    std::optional<double> linear_;
    std::shared_ptr<const TransformTable> table_;
    std::function<double(double)> fn_;
};

// ---------------------------------------------------------------------------
// Shooting

struct ShootConfig {
    Source source;
    Ellipticity ell{1.0, 1.0, 3};
    OperatorSign sign = OperatorSign::Plus;
    double amplitude = 1.0;
    double r_max = 1e4;
    double rtol = 1e-10;
    double atol = 1e-40;  ///< per unit amplitude
    double max_step = std::numeric_limits<double>::infinity();
    double r0 = 1e-8;

    void validate() const {
        if (!(amplitude > 0.0) || !std::isfinite(amplitude))
            throw InvalidInput("amplitude must be positive");
        if (!(r_max > r0) || !std::isfinite(r_max)) throw InvalidInput("r_max must exceed r0");
        if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidInput("tolerances must be positive");
        if (!(r0 > 0.0)) throw InvalidInput("r0 must be positive");
        if (!(max_step > 0.0)) throw InvalidInput("max_step must be positive");
    }
};

enum class Terminal { CrossedZero, ReachedRmax, StepFailure };

inline const char* to_string(Terminal t) {
    switch (t) {
        case Terminal::CrossedZero: return "crossed_zero";
        case Terminal::ReachedRmax: return "reached_rmax";
        case Terminal::StepFailure: return "step_failure";
    }
    return "?";
}

struct RadialSample {
    double r;
    double v;
    double dv;
    double ddv;
};

struct Trajectory {
    ShootConfig config;
    std::vector<RadialSample> samples;  ///< accepted step ends, strictly increasing in r
    std::vector<ode::DenseStep<2>> steps;
    Terminal terminal = Terminal::StepFailure;
    double r_end = 0.0;  ///< crossing radius, r_max, or where integration failed
    double center_curvature = 0.0;  ///< v''(0)
    std::string diagnostic;
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;

    std::optional<double> crossing() const {
        return terminal == Terminal::CrossedZero ? std::optional<double>(r_end) : std::nullopt;
    }

    /// Interpolated state on [0, r_end]; the Taylor seed is used below r0.
    RadialSample at(double r) const {
        if (!(r >= 0.0) || r > r_end * (1.0 + 1e-14))
            throw InvalidInput("trajectory queried outside [0, r_end]");
        const double a = config.amplitude, c = center_curvature;
        if (r <= config.r0 || steps.empty()) return {r, a + 0.5 * c * r * r, c * r, c};
        auto it = std::upper_bound(steps.begin(), steps.end(), r,
                                   [](double x, const ode::DenseStep<2>& s) { return x < s.t0; });
        const auto& st = *(it == steps.begin() ? it : it - 1);
        const auto y = st.eval(r);
        const double ddv =
            radial_rhs(r, y[0], y[1], config.source(y[0]), config.ell, config.sign);
        return {r, y[0], y[1], ddv};
    }

    /// v'' from differentiating the interpolant of v' (independent of the ODE).
    double interpolant_curvature(double r) const {
        if (r <= config.r0 || steps.empty()) return center_curvature;
        auto it = std::upper_bound(steps.begin(), steps.end(), r,
                                   [](double x, const ode::DenseStep<2>& s) { return x < s.t0; });
        const auto& st = *(it == steps.begin() ? it : it - 1);
        return st.derivative(r)[1];
    }

    /// Worst ratio of the sample residual |w(v'') + (n-1) w(v'/r) + h(v)| to its
    /// bound 10 (atol + rtol |h|) plus a rounding allowance; <= 1 means it holds.
    double residual_ratio() const {
        const auto& ell = config.ell;
        const double atol = config.atol * config.amplitude;
        double worst = 0.0;
        for (const auto& s : samples) {
            if (s.r <= 0.0) continue;
            const double h = config.source(s.v);
            const double a = weighting(s.ddv, ell, config.sign);
            const double b = (ell.n() - 1) * weighting(s.dv / s.r, ell, config.sign);
            const double bound = 10.0 * (atol + config.rtol * std::abs(h)) +
                                 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + std::abs(h));
            worst = std::max(worst, std::abs(a + b + h) / bound);
        }
        return worst;
    }

    /// r strictly increasing and |v_i - v_{i-1}| <= 2 (r_i - r_{i-1}) max |v'|.
    bool continuous() const {
        for (std::size_t i = 1; i < samples.size(); ++i) {
            const auto &p = samples[i - 1], &q = samples[i];
            if (!(q.r > p.r)) return false;
            double slope = std::max(std::abs(p.dv), std::abs(q.dv));
            // v' is monotone between samples only approximately; probe the middle too
            if (!steps.empty() && q.r <= r_end) slope = std::max(slope, std::abs(at(0.5 * (p.r + q.r)).dv));
            if (std::abs(q.v - p.v) > 2.0 * (q.r - p.r) * slope + 1e-15 * std::abs(p.v)) return false;
        }
        return true;
    }

    /// Samples on a geometric grid from r_lo to r_end.
    std::vector<RadialSample> geometric(double r_lo, int per_decade) const {
        std::vector<RadialSample> out;
        if (!(r_lo > 0.0) || r_lo >= r_end || per_decade < 1) return out;
        const double decades = std::log10(r_end / r_lo);
        const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
        for (int i = 0; i < count; ++i) {
            const double r = i + 1 == count ? r_end : r_lo * std::pow(10.0, decades * i / (count - 1));
            out.push_back(at(r));
        }
        return out;
    }
};

/// Integrates the radial shot from r0 with the seed v = a + v''(0) r^2 / 2.
/// Stops at the first zero of v, at r_max, or when the step size collapses.
inline Trajectory integrate_shoot(const ShootConfig& cfg) {
    cfg.validate();
    Trajectory tr;
    tr.config = cfg;
    const Ellipticity& ell = cfg.ell;
    const OperatorSign sign = cfg.sign;
    const double a = cfg.amplitude;
    const double c = radial_rhs(0.0, a, 0.0, cfg.source(a), ell, sign);
    tr.center_curvature = c;
    const double r0 = cfg.r0;
    const ode::State<2> y0{a + 0.5 * c * r0 * r0, c * r0};
    tr.samples.push_back({r0, y0[0], y0[1], radial_rhs(r0, y0[0], y0[1], cfg.source(y0[0]), ell, sign)});

    std::string last_error;
    auto rhs = [&](double r, const ode::State<2>& y) -> ode::State<2> {
        try {
            return {y[1], radial_rhs(r, y[0], y[1], cfg.source(y[0]), ell, sign)};
        } catch (const Error& e) {
            last_error = e.what();
            return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        }
    };

    ode::StepControl ctl;
    ctl.rtol = cfg.rtol;
    ctl.atol = cfg.atol * a;
    ctl.initial_step = r0;
    ctl.max_step = cfg.max_step;

    bool crossed = false;
    auto res = ode::integrate<2>(
        rhs, r0, y0, cfg.r_max, ctl,
        [&](const ode::DenseStep<2>& st, const ode::State<2>& y1, const ode::State<2>& f1) {
            tr.steps.push_back(st);
            if (y1[0] > 0.0) {
                tr.samples.push_back({st.t1(), y1[0], y1[1], f1[1]});
                return true;
            }
            // first zero inside this step: bisect the continuous extension
            double lo = st.t0, hi = st.t1();
            if (y1[0] < 0.0) {
                for (int it = 0; it < 200; ++it) {  // down to floating-point resolution
                    const double mid = 0.5 * (lo + hi);
                    if (!(mid > lo && mid < hi)) break;
                    (st.eval(mid)[0] > 0.0 ? lo : hi) = mid;
                }
            }
            const double rc = hi;
            const auto yc = st.eval(rc);
            tr.samples.push_back({rc, yc[0], yc[1], rhs(rc, yc)[1]});
            tr.r_end = rc;
            crossed = true;
            return false;
        });
    tr.accepted = res.accepted;
    tr.rejected = res.rejected;
    tr.evaluations = res.evaluations;
    if (crossed) {
        tr.terminal = Terminal::CrossedZero;
    } else if (res.outcome == ode::Outcome::ReachedEnd) {
        tr.terminal = Terminal::ReachedRmax;
        tr.r_end = cfg.r_max;
    } else {
        tr.terminal = Terminal::StepFailure;
        tr.r_end = res.t;
        tr.diagnostic = "step size collapsed at r = " + detail::format_number(res.t);
        if (!last_error.empty()) tr.diagnostic += " (" + last_error + ")";
    }
    return tr;
}

/// Independent shots, results in input order.
inline std::vector<Trajectory> shoot_sweep(const std::vector<ShootConfig>& cfgs, unsigned jobs = 1) {
    return parallel_map(cfgs, [](const ShootConfig& c) { return integrate_shoot(c); }, jobs);
}

// ---------------------------------------------------------------------------
// Decay classification

enum class DecayKind { Crossing, FastDecay, SlowDecay, PseudoSlow, Undetermined };

inline const char* to_string(DecayKind k) {
    switch (k) {
        case DecayKind::Crossing: return "Crossing";
        case DecayKind::FastDecay: return "FastDecay";
        case DecayKind::SlowDecay: return "SlowDecay";
        case DecayKind::PseudoSlow: return "PseudoSlow";
        case DecayKind::Undetermined: return "Undetermined";
    }
    return "?";
}

/// Fixed detection rules; the asymptotic statements give no thresholds.
struct DecayOptions {
    double tail_decades = 1.0;         ///< fit window [r_end / 10^tail, r_end]
    double converge_decades = 0.5;     ///< convergence is judged on the last half-decade
    double converge_tol = 0.01;        ///< relative variation for "converges"
    double oscillation_decades = 1.0;  ///< window for extrema counting, at least one decade
    double oscillation_tol = 0.05;     ///< (max - min) / mean for a persistent oscillation
    int min_extrema = 3;
    double persistence_ratio = 0.5;    ///< late/early amplitude ratio that counts as persistent
    int min_samples = 50;              ///< integrator samples required in the tail window
    int grid_per_decade = 400;
};

struct DecayClass {
    DecayKind kind = DecayKind::Undetermined;
    double R = 0.0;        ///< Crossing
    double C = 0.0;        ///< FastDecay: lim r^(N-2) v
    double c_star = 0.0;   ///< SlowDecay: lim r^alpha v
    double C1 = 0.0;       ///< PseudoSlow: liminf r^alpha v (window estimate)
    double C2 = 0.0;       ///< PseudoSlow: limsup r^alpha v (window estimate)
    double alpha = 0.0;
    double N_tilde = 0.0;
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();  ///< -d log v / d log r
    double fast_variation = std::numeric_limits<double>::quiet_NaN();
    double slow_variation = std::numeric_limits<double>::quiet_NaN();
    double oscillation_amplitude = std::numeric_limits<double>::quiet_NaN();
    double persistence = std::numeric_limits<double>::quiet_NaN();
    int extrema = 0;
    int window_samples = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline double relative_variation(const std::vector<double>& w, std::size_t from) {
    if (from >= w.size()) return std::numeric_limits<double>::quiet_NaN();
    double lo = w[from], hi = w[from], sum = 0.0;
    for (std::size_t i = from; i < w.size(); ++i) {
        lo = std::min(lo, w[i]);
        hi = std::max(hi, w[i]);
        sum += w[i];
    }
    const double mean = sum / static_cast<double>(w.size() - from);
    return mean > 0.0 ? (hi - lo) / mean : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Classifies the tail of a shot for h(v) = v^p. For transformed problems v
/// already equals phi_g(u), so the same rules apply to r^alpha phi_g(u(r)).
inline DecayClass classify_decay(const Trajectory& tr, double p, const CriticalExponents& consts,
                                 const DecayOptions& opts = {}) {
    if (!(p > 1.0)) throw InvalidInput("classify_decay: p must exceed 1");
    DecayClass out;
    out.alpha = 2.0 / (p - 1.0);
    out.N_tilde = dimension_like(consts, tr.config.sign);
    if (tr.terminal == Terminal::CrossedZero) {
        out.kind = DecayKind::Crossing;
        out.R = tr.r_end;
        return out;
    }
    if (tr.terminal == Terminal::StepFailure) {
        out.diagnostics.push_back("integration failed: " + tr.diagnostic);
        return out;
    }

    const double r_end = tr.r_end;
    const double lo = r_end / std::pow(10.0, opts.tail_decades);
    out.window_lo = lo;
    out.window_hi = r_end;
    out.window_samples = static_cast<int>(std::count_if(
        tr.samples.begin(), tr.samples.end(), [&](const RadialSample& s) { return s.r >= lo; }));
    if (out.window_samples < opts.min_samples) {
        out.diagnostics.push_back("tail window holds " + std::to_string(out.window_samples) +
                                  " samples, fewer than " + std::to_string(opts.min_samples));
        return out;
    }

    const auto tail = tr.geometric(lo, opts.grid_per_decade);
    std::vector<double> ws, wf;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : tail) {
        if (!(s.v > 0.0)) {
            out.diagnostics.push_back("v is not positive in the tail window");
            return out;
        }
        ws.push_back(std::pow(s.r, out.alpha) * s.v);
        wf.push_back(std::pow(s.r, out.N_tilde - 2.0) * s.v);
        const double x = std::log(s.r), y = std::log(s.v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(tail.size());
    out.fitted_exponent = -(m * sxy - sx * sy) / (m * sxx - sx * sx);

    const double half_lo = r_end / std::pow(10.0, opts.converge_decades);
    const auto first_half = static_cast<std::size_t>(
        std::lower_bound(tail.begin(), tail.end(), half_lo,
                         [](const RadialSample& s, double x) { return s.r < x; }) -
        tail.begin());
    out.fast_variation = detail::relative_variation(wf, first_half);
    out.slow_variation = detail::relative_variation(ws, first_half);

    // oscillation analysis of r^alpha v over its own (possibly longer) window
    const double osc_lo = std::max(tr.config.r0, r_end / std::pow(10.0, opts.oscillation_decades));
    const auto osc = tr.geometric(osc_lo, opts.grid_per_decade);
    std::vector<double> wo, lr;
    for (const auto& s : osc) {
        wo.push_back(std::pow(s.r, out.alpha) * s.v);
        lr.push_back(std::log10(s.r));
    }
    std::vector<std::size_t> ext;
    for (std::size_t i = 1; i + 1 < wo.size(); ++i)
        if ((wo[i] - wo[i - 1]) * (wo[i + 1] - wo[i]) < 0.0) ext.push_back(i);
    out.extrema = static_cast<int>(ext.size());
    if (!wo.empty()) {
        out.oscillation_amplitude = detail::relative_variation(wo, 0);
        const double mid = 0.5 * (lr.front() + lr.back());
        const auto split = static_cast<std::size_t>(
            std::lower_bound(lr.begin(), lr.end(), mid) - lr.begin());
        std::vector<double> early(wo.begin(), wo.begin() + split);
        const double a_early = detail::relative_variation(early, 0);
        const double a_late = detail::relative_variation(wo, split);
        out.persistence = a_early > 0.0 ? a_late / a_early : std::numeric_limits<double>::infinity();
    }

    if (out.fast_variation < opts.converge_tol && wf.back() > 0.0) {
        out.kind = DecayKind::FastDecay;
        out.C = wf.back();
        return out;
    }
    if (out.slow_variation < opts.converge_tol && ws.back() > 0.0) {
        out.kind = DecayKind::SlowDecay;
        out.c_star = ws.back();
        return out;
    }
    const bool oscillates = out.extrema >= opts.min_extrema && out.oscillation_amplitude > opts.oscillation_tol;
    const bool persistent = out.persistence >= opts.persistence_ratio;
    if (oscillates && persistent) {
        double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
        for (std::size_t i : ext) {
            c1 = std::min(c1, wo[i]);
            c2 = std::max(c2, wo[i]);
        }
        if (c1 > 0.0 && c1 < c2) {
            out.kind = DecayKind::PseudoSlow;
            out.C1 = c1;
            out.C2 = c2;
            return out;
        }
    }
    out.diagnostics.push_back(
        "persistence: " + std::to_string(out.extrema) + " extrema of r^alpha v over " +
        detail::format_number(std::log10(r_end / osc_lo)) + " decades, amplitude " +
        detail::format_number(out.oscillation_amplitude) + ", late/early amplitude ratio " +
        detail::format_number(out.persistence));
    out.diagnostics.push_back("half-decade variation: r^(N-2) v " +
                              detail::format_number(out.fast_variation) + ", r^alpha v " +
                              detail::format_number(out.slow_variation));
    return out;
}

// ---------------------------------------------------------------------------
// Critical exponent search

struct CriticalSearch {
    std::optional<std::pair<double, double>> bracket;
    double tol_p = 1e-6;
    double r_max = 1e8;
    double rtol = 1e-10;
};

struct CriticalResult {
    double p_star = 0.0;
    double lo = 0.0;  ///< last p with a crossing
    double hi = 0.0;  ///< last p staying positive on [0, r_max]
    int iterations = 0;
    double r_max = 0.0;
    double rtol = 0.0;
    std::vector<std::pair<double, Terminal>> history;
};

/// Default bracket: from the Liouville exponent (crossing) to one above the
/// larger of the upper exponent and (n+2)/(n-2) (positive).
inline std::pair<double, double> default_critical_bracket(const Ellipticity& ell, OperatorSign s) {
    const auto c = critical_constants(ell);
    if (s == OperatorSign::Plus) {
        if (!c.p_s_plus)
            throw InvalidInput("critical exponent search for M+ requires N_plus > 2 (N_plus = " +
                               detail::format_number(c.N_plus) + ")");
        const double top = std::max(*c.p_p_plus, c.p_star_n.value_or(*c.p_p_plus));
        return {*c.p_s_plus, top + 1.0};
    }
    if (!c.p_s_minus || !c.p_star_n)
        throw InvalidInput("default bracket for M- needs n >= 3 and N_minus > 2; pass a bracket");
    return {*c.p_s_minus, *c.p_star_n + 1.0};
}

/// Bisection on p between "crosses zero" and "positive on [0, r_max]" for
/// the normalized shot v(0) = 1 with h(v) = v^p (amplitude is irrelevant by scaling).
inline CriticalResult find_critical_p(const Ellipticity& ell, OperatorSign sign,
                                      const CriticalSearch& opts = {}) {
    if (sign == OperatorSign::Plus && !(critical_constants(ell).N_plus > 2.0))
        throw InvalidInput("critical exponent search for M+ requires N_plus > 2");
    auto [lo, hi] = opts.bracket ? *opts.bracket : default_critical_bracket(ell, sign);
    if (!(lo > 1.0) || !(hi > lo)) throw InvalidInput("critical bracket must satisfy 1 < lo < hi");
    if (!(opts.tol_p > 0.0)) throw InvalidInput("tol_p must be positive");

    CriticalResult out;
    out.r_max = opts.r_max;
    out.rtol = opts.rtol;
    auto shoot = [&](double p) {
        ShootConfig cfg;
        cfg.source = Source::power(p);
        cfg.ell = ell;
        cfg.sign = sign;
        cfg.r_max = opts.r_max;
        cfg.rtol = opts.rtol;
        const auto tr = integrate_shoot(cfg);
        out.history.emplace_back(p, tr.terminal);
        if (tr.terminal == Terminal::StepFailure)
            throw Error("shot at p = " + detail::format_number(p) + " failed: " + tr.diagnostic);
        return tr.terminal;
    };
    const Terminal t_lo = shoot(lo);
    const Terminal t_hi = shoot(hi);
    if (t_lo != Terminal::CrossedZero || t_hi != Terminal::ReachedRmax)
        throw BracketError("bracket [" + detail::format_number(lo) + ", " + detail::format_number(hi) +
                           "] does not straddle the transition: lower end " + to_string(t_lo) +
                           ", upper end " + to_string(t_hi) + " (r_max " +
                           detail::format_number(opts.r_max) + ")");
    while (hi - lo > opts.tol_p) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid) == Terminal::CrossedZero ? lo : hi) = mid;
        ++out.iterations;
    }
    out.lo = lo;
    out.hi = hi;
    out.p_star = 0.5 * (lo + hi);
    return out;
}

// ---------------------------------------------------------------------------
// First eigenvalue on a ball

struct EigenOptions {
    double rel_tol = 1e-8;
    double mu_hi = 0.0;  ///< 0 selects 1e6 / R^2
    double rtol = 1e-12;
};

struct EigenResult {
    double mu = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
};

/// Bisection on mu for M(D^2 phi) + mu phi = 0, phi(0) = 1: the first zero
/// radius decreases strictly in mu, and mu_1 puts it exactly at R.
inline EigenResult first_eigenvalue_search(const Ellipticity& ell, OperatorSign sign, double R,
                                           const EigenOptions& opts = {}) {
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("ball radius must be positive");
    double lo = 0.0;
    double hi = opts.mu_hi > 0.0 ? opts.mu_hi : 1e6 / (R * R);
    auto crosses_inside = [&](double mu) {
        ShootConfig cfg;
        cfg.source = Source::linear(mu);
        cfg.ell = ell;
        cfg.sign = sign;
        cfg.r_max = R;
        cfg.rtol = opts.rtol;
        cfg.r0 = std::min(1e-8, 1e-8 * R);
        const auto tr = integrate_shoot(cfg);
        if (tr.terminal == Terminal::StepFailure)
            throw Error("eigenvalue shot failed: " + tr.diagnostic);
        return tr.terminal == Terminal::CrossedZero;
    };
    if (!crosses_inside(hi))
        throw BracketError("no zero inside the ball up to mu = " + detail::format_number(hi));
    EigenResult out;
    while (hi - lo > opts.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (crosses_inside(mid) ? hi : lo) = mid;
        ++out.iterations;
    }
    out.lo = lo;
    out.hi = hi;
    out.mu = 0.5 * (lo + hi);
    return out;
}

inline double first_eigenvalue_ball(const Ellipticity& ell, OperatorSign sign, double R) {
    return first_eigenvalue_search(ell, sign, R).mu;
}

}  // namespace pucci
