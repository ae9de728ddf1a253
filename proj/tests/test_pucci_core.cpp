#include "pucci/properties.hpp"
#include "pucci/pucci_core.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace pucci;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Characteristic polynomial coefficients by Faddeev-LeVerrier, then the roots
// as eigenvalues of the companion matrix (general nonsymmetric solver).
std::vector<double> charpoly_roots(const std::vector<double>& a, int n) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = a[i * n + j];
    std::vector<double> c(n + 1);
    c[n] = 1.0;
    Eigen::MatrixXd Mk = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        Mk = A * Mk + c[n - k + 1] * Eigen::MatrixXd::Identity(n, n);
        c[n - k] = -(A * Mk).trace() / k;
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i].real());
    std::sort(roots.begin(), roots.end());
    return roots;
}

SymMatrix random_sym(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = U(rng);
    return m;
}

}  // namespace

TEST_CASE("ellipticity rejects invalid constants") {
    CHECK_THROWS_AS(Ellipticity(0.0, 1.0, 3), InvalidInput);
    CHECK_THROWS_AS(Ellipticity(2.0, 1.0, 3), InvalidInput);
    CHECK_THROWS_AS(Ellipticity(1.0, 1.0, 1), InvalidInput);
    CHECK_NOTHROW(Ellipticity(1.0, 1.0, 2));
}

TEST_CASE("symmetric matrix storage is symmetric by construction") {
    SymMatrix m(3);
    m(0, 2) = 5.0;
    CHECK(m(2, 0) == 5.0);
    const auto d = m.dense();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(d[i * 3 + j] == d[j * 3 + i]);
    CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0}), InvalidInput);
}

TEST_CASE("jacobi eigenvalues on closed forms") {
    const double d3[] = {3.0, 1.0, 2.0};
    auto sp = eigenvalues_sym(SymMatrix::diagonal(d3));
    REQUIRE(sp.eigenvalues.size() == 3);
    CHECK(sp.eigenvalues[0] == 1.0);
    CHECK(sp.eigenvalues[1] == 2.0);
    CHECK(sp.eigenvalues[2] == 3.0);

    auto sp2 = eigenvalues_sym(SymMatrix(2, {2.0, 1.0, 2.0}));
    CHECK_THAT(sp2.eigenvalues[0], WithinAbs(1.0, 1e-14));
    CHECK_THAT(sp2.eigenvalues[1], WithinAbs(3.0, 1e-14));

    CHECK_THROWS_AS(eigenvalues_sym(SymMatrix(0)), InvalidInput);
    CHECK_THROWS_AS(eigenvalues_sym(SymMatrix(65)), InvalidInput);
}

TEST_CASE("jacobi eigenvalues agree with companion-matrix roots") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMatrix m = random_sym(rng, 5);
        const auto sp = eigenvalues_sym(m);
        const auto roots = charpoly_roots(m.dense(), 5);
        for (int i = 0; i < 5; ++i) CHECK_THAT(sp.eigenvalues[i], WithinAbs(roots[i], 1e-8));
    }
}

TEST_CASE("jacobi decomposition reconstructs the matrix") {
    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 2u, 6u, 16u, 40u}) {
        const SymMatrix m = random_sym(rng, n);
        const auto sp = eigenvalues_sym(m);
        CHECK(std::is_sorted(sp.eigenvalues.begin(), sp.eigenvalues.end()));
        if (n <= 16) CHECK(sp.ortho_residual <= 1e-10);
        const auto a = m.dense();
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += sp.vectors[i * n + k] * sp.eigenvalues[k] * sp.vectors[j * n + k];
                r += (a[i * n + j] - s) * (a[i * n + j] - s);
            }
        CHECK(std::sqrt(r) <= 1e-10 * std::max(1.0, m.frobenius()));
    }
}

TEST_CASE("pucci operators on small examples") {
    const Ellipticity ell(1.0, 2.0, 3);
    CHECK_THAT(pucci_eval(SymMatrix::identity(3), ell, OperatorSign::Plus), WithinAbs(6.0, 1e-14));
    const double d[] = {1.0, -1.0, 0.0};
    CHECK_THAT(pucci_eval(SymMatrix::diagonal(d), ell, OperatorSign::Plus), WithinAbs(1.0, 1e-14));
    CHECK_THAT(pucci_eval(SymMatrix::diagonal(d), ell, OperatorSign::Minus), WithinAbs(-1.0, 1e-14));
    CHECK_THROWS_AS(pucci_eval(SymMatrix::identity(2), ell, OperatorSign::Plus), InvalidInput);
}

TEST_CASE("pucci operator equals the weighted eigenvalue sum") {
    std::mt19937_64 rng(5);
    const Ellipticity ell(0.7, 3.1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const SymMatrix m = random_sym(rng, 4);
        const auto ev = eigenvalues_sym(m).eigenvalues;
        double pos = 0.0, neg = 0.0;
        for (double e : ev) (e > 0 ? pos : neg) += e;
        CHECK_THAT(pucci_eval(m, ell, OperatorSign::Plus), WithinAbs(3.1 * pos + 0.7 * neg, 1e-12));
        CHECK_THAT(pucci_eval(m, ell, OperatorSign::Minus), WithinAbs(0.7 * pos + 3.1 * neg, 1e-12));
    }
}

TEST_CASE("outer products are rank one") {
    const double e1[] = {1.0, 0.0, 0.0};
    const double d[] = {1.0, 0.0, 0.0};
    CHECK(outer(e1) == SymMatrix::diagonal(d));

    const double xi[] = {1.0, 1.0};
    CHECK_THAT(pucci_eval(outer(xi), Ellipticity(1.0, 2.0, 2), OperatorSign::Plus),
               WithinAbs(4.0, 1e-13));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::vector<double> v(6);
    double nn = 0.0;
    for (auto& x : v) {
        x = U(rng);
        nn += x * x;
    }
    const auto ev = eigenvalues_sym(outer(v)).eigenvalues;
    for (int i = 0; i < 5; ++i) CHECK_THAT(ev[i], WithinAbs(0.0, 1e-12));
    CHECK_THAT(ev[5], WithinAbs(nn, 1e-12));
    CHECK_THROWS_AS(outer(std::span<const double>{}), InvalidInput);
}

TEST_CASE("radial operator matches the diagonal Hessian") {
    const Ellipticity ell(1.0, 2.0, 3);
    CHECK_THAT(pucci_radial_eval(-0.5, 1.0, 1.0, ell, OperatorSign::Plus), WithinAbs(1.0, 1e-15));
    CHECK(pucci_radial_eval(0.0, 3.0, 2.0, ell, OperatorSign::Plus) == 6.0);
    CHECK(pucci_radial_eval(0.0, -3.0, 2.0, ell, OperatorSign::Plus) == -3.0);
    CHECK_THROWS_AS(pucci_radial_eval(0.0, 1.0, 0.0, ell, OperatorSign::Plus), InvalidInput);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-5.0, 5.0), R(0.01, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 5;
        const Ellipticity e(0.5, 1.5, n);
        const double up = U(rng), upp = U(rng), r = R(rng);
        std::vector<double> diag(n, up / r);
        diag[0] = upp;
        for (auto s : {OperatorSign::Plus, OperatorSign::Minus}) {
            const double expect = pucci_eval(SymMatrix::diagonal(diag), e, s);
            CHECK_THAT(pucci_radial_eval(up, upp, r, e, s), WithinAbs(expect, 1e-12 * std::max(1.0, std::abs(expect))));
        }
    }
}

TEST_CASE("one-dimensional inversion of the weighting") {
    const Ellipticity ell(1.0, 2.0, 3);
    CHECK(invert_pucci_1d(4.0, ell, OperatorSign::Plus) == 2.0);
    CHECK(invert_pucci_1d(-3.0, ell, OperatorSign::Plus) == -3.0);
    CHECK(invert_pucci_1d(4.0, ell, OperatorSign::Minus) == 4.0);
    CHECK(invert_pucci_1d(-3.0, ell, OperatorSign::Minus) == -1.5);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-100.0, 100.0);
    const Ellipticity e(0.3, 7.0, 4);
    for (int i = 0; i < 1000; ++i) {
        const double t = U(rng);
        for (auto s : {OperatorSign::Plus, OperatorSign::Minus})
            CHECK_THAT(weighting(invert_pucci_1d(t, e, s), e, s), WithinAbs(t, 1e-14 * std::max(1.0, std::abs(t))));
    }
}

TEST_CASE("operator property suite passes on random matrices") {
    const auto rep = check_operator_properties(2024, 1000);
    for (const auto& c : rep.checks) {
        INFO(c.name << " worst " << c.worst);
        CHECK(c.failures == 0);
        CHECK(c.trials > 0);
    }
}

TEST_CASE("gradient identity suite passes on random triples") {
    const auto rep = check_gradient_identity(7, 1000);
    for (const auto& c : rep.checks) {
        INFO(c.name << " worst " << c.worst);
        CHECK(c.failures == 0);
    }
}

TEST_CASE("property suites are deterministic in the seed") {
    const auto a = check_operator_properties(99, 50);
    const auto b = check_operator_properties(99, 50);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].worst == b.checks[i].worst);
}

TEST_CASE("sign names parse") {
    CHECK(parse_sign("plus") == OperatorSign::Plus);
    CHECK(parse_sign("minus") == OperatorSign::Minus);
    CHECK_THROWS_AS(parse_sign("both"), InvalidInput);
    CHECK_THAT(pucci_eval(SymMatrix::identity(2), Ellipticity(1.0, 1.0, 2), OperatorSign::Minus),
               WithinRel(2.0, 1e-15));
}
