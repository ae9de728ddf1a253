#pragma once

// Seeded randomized property suites for the Pucci operators and the
// gradient-term identity of the exponential change of variables. Shared by the
// `verify` subcommand and the test suites.

#include "pucci/pucci_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pucci {

struct PropertyCheck {
    std::string name;
    long trials = 0;
    long failures = 0;
    double worst = 0.0;  ///< largest violation seen (scaled as in the check)
};

struct PropertyReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<PropertyCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const PropertyCheck& c) { return c.failures == 0; });
    }
    long total_trials() const {
        long s = 0;
        for (const auto& c : checks) s += c.trials;
        return s;
    }
    long total_failures() const {
        long s = 0;
        for (const auto& c : checks) s += c.failures;
        return s;
    }
};

namespace detail {

class PropertyRng {
public:
    explicit PropertyRng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

    SymMatrix matrix(std::size_t dim, double scale = 1.0) {
        SymMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) m(i, j) = scale * uniform(-1.0, 1.0);
        return m;
    }

    std::vector<double> vector(std::size_t dim) {
        std::vector<double> v(dim);
        for (auto& x : v) x = uniform(-1.0, 1.0);
        return v;
    }

    Ellipticity ellipticity(int n) {
        const double lo = uniform(0.1, 2.0);
        return Ellipticity(lo, lo * uniform(1.0, 5.0), n);
    }

    /// Random orthogonal matrix (row-major) by Gram-Schmidt on Gaussian columns.
    std::vector<double> orthogonal(std::size_t n) {
        std::vector<double> q(n * n);
        for (auto& x : q) x = normal();
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < k; ++j) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) d += q[i * n + k] * q[i * n + j];
                for (std::size_t i = 0; i < n; ++i) q[i * n + k] -= d * q[i * n + j];
            }
            double nn = 0.0;
            for (std::size_t i = 0; i < n; ++i) nn += q[i * n + k] * q[i * n + k];
            nn = std::sqrt(nn);
            for (std::size_t i = 0; i < n; ++i) q[i * n + k] /= nn;
        }
        return q;
    }

private:
    std::mt19937_64 eng_;
};

inline void record(PropertyCheck& c, double violation, double slack) {
    ++c.trials;
    c.worst = std::max(c.worst, violation);
    if (!(violation <= slack)) ++c.failures;
}

/// Q^T M Q for row-major orthogonal Q.
inline SymMatrix rotate(const SymMatrix& m, const std::vector<double>& q) {
    const std::size_t n = m.dim();
    const std::vector<double> a = m.dense();
    std::vector<double> aq(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) aq[i * n + j] += a[i * n + k] * q[k * n + j];
    SymMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += q[k * n + i] * aq[k * n + j];
            out(i, j) = s;
        }
    return out;
}

}  // namespace detail

/// Homogeneity, the two chain inequalities, duality, trace degeneracy and
/// rotation invariance on `count` random matrices of dimension 2..6.
inline PropertyReport check_operator_properties(std::uint64_t seed, int count = 1000,
                                                double slack = 1e-10) {
    detail::PropertyRng rng(seed);
    PropertyReport rep{"operators", seed, {}};
    PropertyCheck homog{"homogeneity"}, chain_plus{"chain_plus"}, chain_minus{"chain_minus"},
        duality{"duality"}, trace{"trace_degeneracy"}, rotation{"rotation_invariance"};
    constexpr auto P = OperatorSign::Plus;
    constexpr auto M = OperatorSign::Minus;
    for (int k = 0; k < count; ++k) {
        const int n = rng.integer(2, 6);
        const Ellipticity ell = rng.ellipticity(n);
        const SymMatrix a = rng.matrix(n, rng.uniform(0.1, 10.0));
        const SymMatrix b = rng.matrix(n, rng.uniform(0.1, 10.0));
        const double scale = std::max({1.0, a.frobenius(), b.frobenius()}) * ell.Lambda();

        for (double alpha : {0.0, 0.5, 2.0, 10.0}) {
            for (auto s : {P, M}) {
                const double lhs = pucci_eval(alpha * a, ell, s);
                const double rhs = alpha * pucci_eval(a, ell, s);
                detail::record(homog, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), 1e-12);
            }
        }

        const double pa = pucci_eval(a, ell, P), ma = pucci_eval(a, ell, M);
        const double pb = pucci_eval(b, ell, P), mb = pucci_eval(b, ell, M);
        const double pab = pucci_eval(a + b, ell, P), mab = pucci_eval(a + b, ell, M);
        detail::record(chain_plus, std::max({pa + mb - pab, pab - (pa + pb), 0.0}) / scale, slack);
        detail::record(chain_minus, std::max({ma + mb - mab, mab - (pa + mb), 0.0}) / scale, slack);

        const double dual = pucci_eval(-a, ell, P);
        detail::record(duality, std::abs(ma + dual) / std::max(1.0, std::abs(ma)), 1e-12);

        const Ellipticity iso(ell.lambda(), ell.lambda(), n);
        for (auto s : {P, M}) {
            const double v = pucci_eval(a, iso, s);
            detail::record(trace, std::abs(v - ell.lambda() * a.trace()), slack * std::max(1.0, scale));
        }

        const auto q = rng.orthogonal(n);
        const SymMatrix rot = detail::rotate(a, q);
        for (auto s : {P, M}) {
            const double v0 = pucci_eval(a, ell, s);
            const double v1 = pucci_eval(rot, ell, s);
            detail::record(rotation, std::abs(v0 - v1) / std::max(1.0, std::abs(v0)), 1e-9);
        }
    }
    rep.checks = {homog, chain_plus, chain_minus, duality, trace, rotation};
    return rep;
}

/// For phi(t) = exp(c t) - 1 and random (M, xi, u, c): the identity
///   (1/phi'(u)) M(phi'(u) M + phi''(u) xi (x) xi) = M(M + (phi''/phi') xi (x) xi)
/// and the two-sided bounds through M-(xi (x) xi) and M+(xi (x) xi).
inline PropertyReport check_gradient_identity(std::uint64_t seed, int count = 1000,
                                              double slack = 1e-10) {
    detail::PropertyRng rng(seed);
    PropertyReport rep{"lemma21", seed, {}};
    PropertyCheck identity{"identity"}, sandwich_plus{"sandwich_plus"},
        sandwich_minus{"sandwich_minus"};
    for (int k = 0; k < count; ++k) {
        const int n = rng.integer(2, 6);
        const Ellipticity ell = rng.ellipticity(n);
        const SymMatrix hess = rng.matrix(n, rng.uniform(0.1, 5.0));
        const auto xi = rng.vector(n);
        const double c = rng.uniform(0.05, 3.0);
        const double u = rng.uniform(0.0, 2.0);
        const double d1 = c * std::exp(c * u);      // phi'
        const double d2 = c * c * std::exp(c * u);  // phi''
        const SymMatrix xx = outer(xi);
        const SymMatrix d2v = d1 * hess + d2 * xx;
        const double ratio = d2 / d1;

        for (auto s : {OperatorSign::Plus, OperatorSign::Minus}) {
            const double lhs = pucci_eval(d2v, ell, s) / d1;
            const double rhs = pucci_eval(hess + ratio * xx, ell, s);
            const double scale = std::max(1.0, std::abs(rhs));
            detail::record(identity, std::abs(lhs - rhs) / scale, slack);

            const double base = pucci_eval(hess, ell, s);
            const double lo = base + ratio * pucci_eval(xx, ell, OperatorSign::Minus);
            const double hi = base + ratio * pucci_eval(xx, ell, OperatorSign::Plus);
            const double viol = std::max({lo - lhs, lhs - hi, 0.0}) / scale;
            detail::record(s == OperatorSign::Plus ? sandwich_plus : sandwich_minus, viol, slack);
        }
    }
    rep.checks = {identity, sandwich_plus, sandwich_minus};
    return rep;
}

}  // namespace pucci
