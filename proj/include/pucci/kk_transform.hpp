#pragma once

// Kazdan-Kramer change of variables
//
//   G(t) = int_0^t g,   phi_g(s) = int_0^s exp(G),   h(s) = exp(G(t)) f(t), t = phi_g^{-1}(s)
//
// realized numerically. G and phi_g are integrated together as the system
// (G' = g, phi' = exp(G)) with an adaptive Runge-Kutta method; the accepted
// steps form a monotone grid that is reused for fast inversion.

#include "pucci/error.hpp"
#include "pucci/ode.hpp"
#include "pucci/pairs.hpp"
#include "pucci/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pucci {

struct TransformOptions {
    double tol = 1e-10;
    double t_max = 50.0;
    double overflow_G = 700.0;  ///< exp(G) is refused beyond this
};

/// G(t) by adaptive Gauss-Kronrod quadrature of g. Independent of the
/// Runge-Kutta route used by TransformTable.
inline double compute_G(const GradientPair& pair, double t, double tol = 1e-10) {
    if (!(t >= 0.0)) throw InvalidInput("compute_G: t must be >= 0");
    if (t == 0.0) return 0.0;
    const BoundExpr g = pair.bound_g();
    auto res = integrate_adaptive([&](double x) { return g(x); }, 0.0, t, 0.1 * tol, 0.1 * tol);
    if (!res.converged || !std::isfinite(res.value))
        throw Error("compute_G: quadrature did not reach tolerance on [0, " +
                    detail::format_number(t) + "]");
    return res.value;
}

class TransformTable {
public:
    struct Node {
        double t;
        double G;
        double phi;
        double g;  ///< g(t), cached first stage for restarts
    };

    /// A point on the curve t -> (G(t), phi_g(t)).
    struct Point {
        double t;
        double G;
        double phi;
    };

    explicit TransformTable(GradientPair pair, TransformOptions opts = {})
        : pair_(std::move(pair)), opts_(opts), g_(pair_.bound_g()), f_(pair_.bound_f()) {
        if (!(opts_.tol > 0.0)) throw InvalidInput("transform tolerance must be positive");
        if (!(opts_.t_max > 0.0)) throw InvalidInput("transform t_max must be positive");
        ctl_.rtol = 1e-2 * opts_.tol;
        ctl_.atol = 1e-2 * opts_.tol;
        build();
    }

    const GradientPair& pair() const noexcept { return pair_; }
    const TransformOptions& options() const noexcept { return opts_; }
    std::span<const Node> grid() const noexcept { return nodes_; }

    /// Abscissa where G first exceeded the overflow guard, if reached.
    std::optional<double> overflow_threshold() const noexcept { return overflow_t_; }

    double g(double t) const { return g_(t); }
    double f(double t) const { return f_(t); }

    Point at(double t) const {
        if (!(t >= 0.0)) throw InvalidInput("transform: t must be >= 0");
        if (t == 0.0) return {0.0, 0.0, 0.0};
        if (seed_ && t < nodes_[1].t) return seed_point(t);
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                                   [](double x, const Node& n) { return x < n.t; });
        const Node& base = *(it - 1);
        if (base.t == t) return {base.t, base.G, base.phi};
        if (it == nodes_.end() && overflow_t_) throw overflow(*overflow_t_);
        return from_node(base, t);
    }

    double G(double t) const { return at(t).G; }
    double phi(double s) const { return at(s).phi; }

    /// Solves phi_g(t) = v for t >= 0: bracketing on the grid, monotone cubic
    /// guess, then safeguarded Newton with phi' = exp(G).
    Point locate(double v) const {
        if (!(v >= 0.0)) throw InvalidInput("invert_phi: value must be >= 0");
        if (v == 0.0) return {0.0, 0.0, 0.0};
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), v,
                                   [](const Node& n, double x) { return n.phi < x; });
        if (it != nodes_.end() && it->phi == v) return {it->t, it->G, it->phi};
        if (it != nodes_.end()) {
            const Node& lo = *(it - 1);
            const Node& hi = *it;
            if (seed_ && it == nodes_.begin() + 1) return newton_seed(v, hi);
            return newton(v, lo, {hi.t, hi.G, hi.phi});
        }
        if (overflow_t_) throw overflow(*overflow_t_);
        // beyond the cached grid: march until phi passes v
        const Advance adv = advance(nodes_.back(), std::numeric_limits<double>::infinity(), v);
        return newton(v, adv.start, adv.end);
    }

    double phi_inv(double v) const { return locate(v).t; }

    double h_at(const Point& p) const { return std::exp(p.G) * f_(p.t); }

    /// h(s) = exp(G(t)) f(t) with t = phi_g^{-1}(s).
    double h(double s) const { return h_at(locate(s)); }

private:
    struct Advance {
        Node start;  // last grid-like node before the end point
        Point end;
    };

    OverflowError overflow(double t) const {
        return OverflowError("G exceeds " + detail::format_number(opts_.overflow_G) +
                                 " (exp(G) overflows) beyond t = " + detail::format_number(t),
                             t);
    }

    ode::State<2> rhs(double t, const ode::State<2>& y) const {
        return {g_(t), std::exp(y[0])};
    }

    void build() {
        double g0 = g_(0.0);
        ode::State<2> y0{0.0, 0.0};
        double t0 = 0.0;
        nodes_.push_back({0.0, 0.0, 0.0, g0});
        if (!std::isfinite(g0)) {
            // integrable singularity at 0: seed a short distance in
            seed_ = true;
            t0 = std::min(1e-12, 1e-3 * opts_.t_max);
            const double G0 = integrate_adaptive([&](double x) { return g_(x); }, 0.0, t0,
                                                 1e-3 * opts_.tol, 1e-3 * opts_.tol)
                                  .value;
            y0 = {G0, t0 * (1.0 + 0.5 * G0)};
            nodes_.push_back({t0, y0[0], y0[1], g_(t0)});
        }
        auto res = ode::integrate<2>(
            [this](double t, const ode::State<2>& y) { return rhs(t, y); }, t0, y0, opts_.t_max, ctl_,
            [this](const ode::DenseStep<2>& st, const ode::State<2>& y1, const ode::State<2>& f1) {
                nodes_.push_back({st.t1(), y1[0], y1[1], f1[0]});
                if (y1[0] > opts_.overflow_G) {
                    overflow_t_ = locate_guard(st);
                    return false;
                }
                return true;
            });
        if (res.outcome == ode::Outcome::StepFailure)
            throw Error("transform: integration of (G, phi) failed near t = " +
                        detail::format_number(res.t));
    }

    double locate_guard(const ode::DenseStep<2>& st) const {
        double lo = st.t0, hi = st.t1();
        for (int i = 0; i < 80 && hi - lo > 1e-12 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (st.eval(mid)[0] > opts_.overflow_G ? hi : lo) = mid;
        }
        return hi;
    }

    // Integrates from `base` until t_end or until phi >= phi_stop.
    Advance advance(const Node& base, double t_end, double phi_stop) const {
        ode::StepControl ctl = ctl_;
        const bool to_point = std::isfinite(t_end);
        if (to_point) ctl.initial_step = t_end - base.t;
        Advance out{base, {base.t, base.G, base.phi}};
        const double horizon = to_point ? t_end : std::numeric_limits<double>::max();
        std::optional<double> overflow_at;
        auto res = ode::integrate<2>(
            [this](double t, const ode::State<2>& y) { return rhs(t, y); }, base.t,
            ode::State<2>{base.G, base.phi}, horizon, ctl,
            [&](const ode::DenseStep<2>& st, const ode::State<2>& y1, const ode::State<2>& f1) {
                if (y1[0] > opts_.overflow_G) {
                    overflow_at = locate_guard(st);
                    return false;
                }
                if (!to_point && y1[1] >= phi_stop) {
                    out.end = {st.t1(), y1[0], y1[1]};
                    return false;
                }
                out.start = {st.t1(), y1[0], y1[1], f1[0]};
                return true;
            });
        if (overflow_at) throw overflow(*overflow_at);
        if (res.outcome == ode::Outcome::StepFailure)
            throw Error("transform: integration failed near t = " + detail::format_number(res.t));
        if (to_point) out.end = {res.t, res.y[0], res.y[1]};
        return out;
    }

    Point from_node(const Node& base, double t) const {
        if (t == base.t) return {base.t, base.G, base.phi};
        const double dt = t - base.t;
        if (dt < 1e-10 * t) {
            // below the integrator's minimum step: second-order Taylor from the node
            const double e = std::exp(base.G);
            return {t, base.G + base.g * dt, base.phi + e * dt * (1.0 + 0.5 * base.g * dt)};
        }
        return advance(base, t, std::numeric_limits<double>::infinity()).end;
    }

    // Below the first integrated node of a singular g: phi(t) = t (1 + O(G)).
    Point seed_point(double t) const {
        const double G = integrate_adaptive([&](double x) { return g_(x); }, 0.0, t,
                                            1e-3 * opts_.tol, 1e-3 * opts_.tol)
                             .value;
        return {t, G, t * (1.0 + 0.5 * G)};
    }

    Point newton_seed(double v, const Node& hi) const {
        double lo_t = 0.0, hi_t = hi.t, t = v;
        for (int i = 0; i < 60; ++i) {
            const Point p = seed_point(t);
            const double F = p.phi - v;
            if (std::abs(F) <= 0.1 * opts_.tol * v) return p;
            (F < 0.0 ? lo_t : hi_t) = t;
            double next = t - F * std::exp(-p.G);
            if (!(next > lo_t && next < hi_t)) next = 0.5 * (lo_t + hi_t);
            t = next;
        }
        return seed_point(t);
    }

    Point newton(double v, const Node& lo, const Point& hi) const {
        // monotone cubic (Fritsch-Carlson limited) guess for the inverse
        const double dphi = hi.phi - lo.phi;
        const double secant = (hi.t - lo.t) / dphi;
        double d0 = std::exp(-lo.G), d1 = std::exp(-hi.G);
        const double a = d0 / secant, b = d1 / secant, r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double s = 3.0 / std::sqrt(r2);
            d0 *= s;
            d1 *= s;
        }
        const double x = (v - lo.phi) / dphi;
        const double x2 = x * x, x3 = x2 * x;
        double t = (2 * x3 - 3 * x2 + 1) * lo.t + (x3 - 2 * x2 + x) * dphi * d0 +
                   (-2 * x3 + 3 * x2) * hi.t + (x3 - x2) * dphi * d1;
        double lo_t = lo.t, hi_t = hi.t;
        if (!(t > lo_t && t < hi_t)) t = lo_t + x * (hi_t - lo_t);

        const double stop = 0.1 * opts_.tol * v;
        Point best{hi.t, hi.G, hi.phi};
        double best_err = std::abs(hi.phi - v);
        for (int i = 0; i < 100; ++i) {
            const Point p = from_node(lo, t);
            const double F = p.phi - v;
            if (std::abs(F) < best_err) {
                best = p;
                best_err = std::abs(F);
            }
            if (std::abs(F) <= stop) return p;
            (F < 0.0 ? lo_t : hi_t) = t;
            if (hi_t - lo_t <= 4.0 * std::numeric_limits<double>::epsilon() * hi_t) break;
            double next = t - F * std::exp(-p.G);
            if (!(next > lo_t && next < hi_t)) next = 0.5 * (lo_t + hi_t);
            t = next;
        }
        return best;
    }

    GradientPair pair_;
    TransformOptions opts_;
    BoundExpr g_;
    BoundExpr f_;
    ode::StepControl ctl_;
    std::vector<Node> nodes_;
    bool seed_ = false;
    std::optional<double> overflow_t_;
};

/// phi_g(s) by integrating (G, phi) from 0 to s.
inline double compute_phi(const GradientPair& pair, double s, double tol = 1e-10) {
    if (!(s >= 0.0)) throw InvalidInput("compute_phi: s must be >= 0");
    if (s == 0.0) return 0.0;
    TransformTable table(pair, {tol, s, 700.0});
    return table.phi(s);
}

inline double invert_phi(const GradientPair& pair, double v, double tol = 1e-10) {
    if (!(v >= 0.0)) throw InvalidInput("invert_phi: value must be >= 0");
    TransformTable table(pair, {tol, 50.0, 700.0});
    return table.phi_inv(v);
}

inline double transformed_h(const GradientPair& pair, double s, double tol = 1e-10) {
    if (!(s >= 0.0)) throw InvalidInput("transformed_h: s must be >= 0");
    TransformTable table(pair, {tol, 50.0, 700.0});
    return table.h(s);
}

// ---------------------------------------------------------------------------
// Growth classification (heuristic: limsup/liminf cannot be decided by sampling)

enum class Trend { Converged, DivergingUp, DivergingDown, Vanishing, Unstable, Insufficient };

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::Converged: return "converged";
        case Trend::DivergingUp: return "diverging_up";
        case Trend::DivergingDown: return "diverging_down";
        case Trend::Vanishing: return "vanishing";
        case Trend::Unstable: return "unstable";
        case Trend::Insufficient: return "insufficient";
    }
    return "?";
}

struct LimitEstimate {
    double value = std::numeric_limits<double>::quiet_NaN();  ///< +-inf when diverging
    Trend trend = Trend::Insufficient;
    std::vector<double> samples;  ///< ordered towards the limit point

    bool determined() const noexcept {
        return trend != Trend::Unstable && trend != Trend::Insufficient;
    }
};

/// Reads the limit of a sequence from its last three terms: converged when
/// both relative changes are <= 10%, diverging/vanishing when the terms keep
/// one sign and move monotonically by a factor of at least 1.1 per step.
inline LimitEstimate estimate_limit(std::vector<double> seq) {
    LimitEstimate out;
    out.samples = std::move(seq);
    const auto& y = out.samples;
    if (y.size() < 3) return out;
    const std::size_t k = y.size();
    const double a = y[k - 3], b = y[k - 2], c = y[k - 1];
    auto rel = [](double u, double v) {
        const double s = std::max(std::abs(u), std::abs(v));
        return s == 0.0 ? 0.0 : std::abs(u - v) / s;
    };
    if (rel(a, b) <= 0.1 && rel(b, c) <= 0.1) {
        out.trend = Trend::Converged;
        out.value = c;
        return out;
    }
    const bool same_sign = (a > 0 && b > 0 && c > 0) || (a < 0 && b < 0 && c < 0);
    if (same_sign) {
        const double r1 = b / a, r2 = c / b;
        if (r1 >= 1.1 && r2 >= 1.1) {
            out.trend = c > 0 ? Trend::DivergingUp : Trend::DivergingDown;
            out.value = c > 0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
            return out;
        }
        if (r1 <= 1 / 1.1 && r2 <= 1 / 1.1) {
            out.trend = Trend::Vanishing;
            out.value = 0.0;
            return out;
        }
    }
    out.trend = Trend::Unstable;
    return out;
}

enum class GrowthClass { Sublinear, Superlinear, Neither, Undetermined };

inline const char* to_string(GrowthClass g) {
    switch (g) {
        case GrowthClass::Sublinear: return "Sublinear";
        case GrowthClass::Superlinear: return "Superlinear";
        case GrowthClass::Neither: return "Neither";
        case GrowthClass::Undetermined: return "Undetermined";
    }
    return "?";
}

struct GrowthOptions {
    int k_max = 6;                 ///< samples s = 10^{+-k}, k = 0..k_max
    double tol = 1e-10;
    std::optional<double> p;       ///< exponent for the C* = lim h(s)/s^p estimate
    std::optional<double> gamma;   ///< lower-bound check f(t) >= -gamma phi(t)
};

struct GrowthReport {
    GrowthClass growth = GrowthClass::Undetermined;
    LimitEstimate at_zero;      ///< h(s)/s as s -> 0
    LimitEstimate at_infinity;  ///< h(s)/s as s -> infinity
    double mu1_used = 0.0;
    std::optional<double> c_star;
    std::optional<double> C_star;
    std::optional<LimitEstimate> power_ratio;  ///< h(s)/s^p as s -> infinity
    double f_at_zero = 0.0;
    std::optional<double> max_lower_bound_violation;
    std::vector<std::string> notes;
    bool heuristic = true;
};

inline GrowthReport classify_growth(const GradientPair& pair, double mu1, const GrowthOptions& opts = {}) {
    if (!(mu1 > 0.0)) throw InvalidInput("classify_growth: mu1 must be positive");
    if (opts.k_max < 3) throw InvalidInput("classify_growth: k_max must be at least 3");
    GrowthReport rep;
    rep.mu1_used = mu1;
    TransformTable table(pair, {opts.tol, 50.0, 700.0});
    rep.f_at_zero = table.f(0.0);
    double worst_violation = 0.0;

    auto sample = [&](double s, double power, std::vector<double>& into) -> bool {
        try {
            const auto pt = table.locate(s);
            const double hv = table.h_at(pt);
            if (!std::isfinite(hv)) {
                rep.notes.push_back("h overflowed at s = " + detail::format_number(s) +
                                    "; sequence truncated");
                return false;
            }
            if (opts.gamma) {
                const double viol = -*opts.gamma * pt.phi - table.f(pt.t);
                worst_violation = std::max(worst_violation, viol);
            }
            into.push_back(hv / std::pow(s, power));
            return true;
        } catch (const OverflowError& e) {
            rep.notes.push_back(std::string("overflow while sampling: ") + e.what() +
                                "; sequence truncated");
            return false;
        }
    };

    std::vector<double> zero_seq, inf_seq, pow_seq;
    for (int k = 0; k <= opts.k_max; ++k)
        if (!sample(std::pow(10.0, -k), 1.0, zero_seq)) break;
    for (int k = 0; k <= opts.k_max; ++k)
        if (!sample(std::pow(10.0, k), 1.0, inf_seq)) break;
    if (opts.p) {
        for (int k = 0; k <= opts.k_max; ++k)
            if (!sample(std::pow(10.0, k), *opts.p, pow_seq)) break;
        rep.power_ratio = estimate_limit(pow_seq);
        if (rep.power_ratio->trend == Trend::Converged) rep.C_star = rep.power_ratio->value;
    }

    rep.at_zero = estimate_limit(zero_seq);
    rep.at_infinity = estimate_limit(inf_seq);
    // a truncated but clearly exploding tail still counts as divergence
    if (rep.at_infinity.trend == Trend::Insufficient && inf_seq.size() >= 2 &&
        inf_seq.size() < static_cast<std::size_t>(opts.k_max + 1) && inf_seq.back() > inf_seq.front() &&
        inf_seq.back() > 0.0) {
        rep.at_infinity.trend = Trend::DivergingUp;
        rep.at_infinity.value = std::numeric_limits<double>::infinity();
        rep.notes.push_back("tail truncated by overflow while increasing; read as +inf");
    }
    if (rep.at_zero.trend == Trend::Converged || rep.at_zero.trend == Trend::Vanishing)
        rep.c_star = rep.at_zero.value;
    if (opts.gamma) rep.max_lower_bound_violation = worst_violation;

    if (!rep.at_zero.determined() || !rep.at_infinity.determined()) {
        rep.growth = GrowthClass::Undetermined;
    } else {
        const double l0 = rep.at_zero.value, linf = rep.at_infinity.value;
        if (linf < mu1 && mu1 < l0)
            rep.growth = GrowthClass::Sublinear;
        else if (l0 < mu1 && mu1 < linf)
            rep.growth = GrowthClass::Superlinear;
        else
            rep.growth = GrowthClass::Neither;
    }
    return rep;
}

}  // namespace pucci
