#pragma once

// Pucci extremal operators on symmetric matrices and in radial form.
//
//   M+(M) = Lambda * sum_{e_i > 0} e_i + lambda * sum_{e_i < 0} e_i
//   M-(M) = lambda * sum_{e_i > 0} e_i + Lambda * sum_{e_i < 0} e_i
//
// where e_i are the eigenvalues of M. Eigenvalues are computed with cyclic
// Jacobi rotations; everything here is a pure function of its arguments.

#include "pucci/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace pucci {

enum class OperatorSign { Plus, Minus };

inline const char* to_string(OperatorSign s) { return s == OperatorSign::Plus ? "plus" : "minus"; }

inline OperatorSign parse_sign(const std::string& s) {
    if (s == "plus" || s == "+") return OperatorSign::Plus;
    if (s == "minus" || s == "-") return OperatorSign::Minus;
    throw InvalidInput("operator sign must be 'plus' or 'minus', got '" + s + "'");
}

/// Ellipticity constants 0 < lambda <= Lambda together with the space dimension n >= 2.
class Ellipticity {
public:
    Ellipticity(double lambda, double Lambda, int n) : lambda_(lambda), Lambda_(Lambda), n_(n) {
        if (!(lambda > 0.0) || !(Lambda >= lambda) || !std::isfinite(Lambda))
            throw InvalidInput("ellipticity requires 0 < lambda <= Lambda");
        if (n < 2) throw InvalidInput("dimension n must be at least 2");
    }

    double lambda() const noexcept { return lambda_; }
    double Lambda() const noexcept { return Lambda_; }
    int n() const noexcept { return n_; }

    /// Weight applied to a positive eigenvalue by the operator of the given sign.
    double positive_weight(OperatorSign s) const noexcept {
        return s == OperatorSign::Plus ? Lambda_ : lambda_;
    }
    double negative_weight(OperatorSign s) const noexcept {
        return s == OperatorSign::Plus ? lambda_ : Lambda_;
    }

    friend bool operator==(const Ellipticity&, const Ellipticity&) = default;

private:
    double lambda_;
    double Lambda_;
    int n_;
};

/// Symmetric matrix stored as its row-major upper triangle (diagonal included).
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim + 1) / 2, 0.0) {}

    SymMatrix(std::size_t dim, std::vector<double> upper) : dim_(dim), upper_(std::move(upper)) {
        if (upper_.size() != dim * (dim + 1) / 2)
            throw InvalidInput("upper triangle of a " + std::to_string(dim) + "x" +
                               std::to_string(dim) + " matrix needs " +
                               std::to_string(dim * (dim + 1) / 2) + " entries");
    }

    static SymMatrix identity(std::size_t dim) {
        SymMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static SymMatrix diagonal(std::span<const double> d) {
        SymMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    /// Symmetrizes a dense row-major square matrix, (A + A^T) / 2.
    static SymMatrix from_dense(std::size_t dim, std::span<const double> a) {
        if (a.size() != dim * dim) throw InvalidInput("dense matrix has wrong number of entries");
        SymMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) m(i, j) = 0.5 * (a[i * dim + j] + a[j * dim + i]);
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> upper() const noexcept { return upper_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return upper_[index(i, j)]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return upper_[index(i, j)]; }

    /// Row-major dense copy.
    std::vector<double> dense() const {
        std::vector<double> a(dim_ * dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) a[i * dim_ + j] = (*this)(i, j);
        return a;
    }

    double frobenius() const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    double trace() const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
        return s;
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += o.upper_[k];
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] -= o.upper_[k];
        return *this;
    }
    SymMatrix& operator*=(double a) noexcept {
        for (double& x : upper_) x *= a;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept {
        if (i > j) std::swap(i, j);
        // offset of row i in the packed upper triangle, then column j
        return i * dim_ - i * (i - 1) / 2 + (j - i);
    }

    void require_same_dim(const SymMatrix& o) const {
        if (o.dim_ != dim_) throw InvalidInput("matrix dimensions differ");
    }

    std::size_t dim_ = 0;
    std::vector<double> upper_;
};

/// Eigen-decomposition result. Eigenvalues ascending; `vectors` is row-major
/// with eigenvector k stored in column k.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<double> vectors;
    double ortho_residual = 0.0;  ///< ||V^T V - I||_F
    int sweeps = 0;
};

inline constexpr std::size_t kMaxEigenDim = 64;

/// Cyclic Jacobi eigen-decomposition. Stops when the off-diagonal Frobenius
/// norm drops below 1e-14 ||M||_F or after 100 sweeps.
inline Spectrum eigenvalues_sym(const SymMatrix& m) {
    const std::size_t n = m.dim();
    if (n == 0) throw InvalidInput("eigenvalues_sym: dimension 0");
    if (n > kMaxEigenDim) throw InvalidInput("eigenvalues_sym: dimension exceeds 64");

    std::vector<double> a = m.dense();
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };

    const double norm = m.frobenius();
    const double target = 1e-14 * norm;
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += A(i, j) * A(i, j);
        return std::sqrt(s);
    };

    Spectrum out;
    for (int sweep = 0; sweep < 100 && norm > 0.0; ++sweep) {
        if (off_norm() <= target) break;
        out.sweeps = sweep + 1;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = A(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return A(i, i) < A(j, j); });
    out.eigenvalues.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = A(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + k] = V(i, order[k]);
    }

    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < n; ++k) d += out.vectors[k * n + i] * out.vectors[k * n + j];
            d -= (i == j) ? 1.0 : 0.0;
            r += d * d;
        }
    }
    out.ortho_residual = std::sqrt(r);
    return out;
}

/// Sign-dependent weighting of a single eigenvalue: positive parts get the
/// positive weight of the operator, negative parts the negative weight.
inline double weighting(double x, const Ellipticity& ell, OperatorSign s) noexcept {
    return x > 0.0 ? ell.positive_weight(s) * x : ell.negative_weight(s) * x;
}

/// Inverse of `weighting`; the weighting is a strictly increasing bijection of R.
inline double invert_pucci_1d(double target, const Ellipticity& ell, OperatorSign s) noexcept {
    return target >= 0.0 ? target / ell.positive_weight(s) : target / ell.negative_weight(s);
}

/// Weighted eigenvalue sum. Eigenvalues with |e| <= zero_tol count as zero.
inline double pucci_from_eigenvalues(std::span<const double> eigenvalues, const Ellipticity& ell,
                                     OperatorSign s, double zero_tol = 0.0) {
    double pos = 0.0, neg = 0.0;
    for (double e : eigenvalues) {
        if (std::abs(e) <= zero_tol) continue;
        (e > 0.0 ? pos : neg) += e;
    }
    return ell.positive_weight(s) * pos + ell.negative_weight(s) * neg;
}

inline double pucci_zero_tolerance(const SymMatrix& m) {
    return 1e-13 * std::max(1.0, m.frobenius());
}

inline double pucci_eval(const SymMatrix& m, const Ellipticity& ell, OperatorSign s) {
    if (m.dim() != static_cast<std::size_t>(ell.n()))
        throw InvalidInput("pucci_eval: matrix dimension " + std::to_string(m.dim()) +
                           " does not match n = " + std::to_string(ell.n()));
    const Spectrum sp = eigenvalues_sym(m);
    return pucci_from_eigenvalues(sp.eigenvalues, ell, s, pucci_zero_tolerance(m));
}

/// xi (x) xi = (xi_i xi_j).
inline SymMatrix outer(std::span<const double> xi) {
    if (xi.empty()) throw InvalidInput("outer: empty vector");
    SymMatrix m(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
        for (std::size_t j = i; j < xi.size(); ++j) m(i, j) = xi[i] * xi[j];
    return m;
}

/// Operator applied to the Hessian of a radial function: the spectrum is
/// {u'', u'/r repeated n-1 times}.
inline double pucci_radial_eval(double up, double upp, double r, const Ellipticity& ell,
                                OperatorSign s) {
    if (!(r > 0.0)) throw InvalidInput("pucci_radial_eval: r must be positive");
    return weighting(upp, ell, s) + (ell.n() - 1) * weighting(up / r, ell, s);
}

}  // namespace pucci
