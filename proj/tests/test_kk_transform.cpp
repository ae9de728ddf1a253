#include "pucci/kk_transform.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace pucci;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("G by quadrature") {
    CHECK_THAT(compute_G(make_pair("1", "t"), 2.5), WithinAbs(2.5, 1e-10));
    CHECK_THAT(compute_G(make_pair("2*t/(1+t^2)", "t"), 1.0), WithinAbs(std::log(2.0), 1e-10));
    CHECK(compute_G(make_pair("0", "t"), 3.0) == 0.0);
    CHECK(compute_G(make_pair("1", "t"), 0.0) == 0.0);
    CHECK_THROWS_AS(compute_G(make_pair("1", "t"), -1.0), InvalidInput);
    // singular integrand 0.5 t^(-1/2)
    CHECK_THAT(compute_G(builtin_pair("power-m", {{"m", 0.5}, {"p", 1.0}}), 4.0), WithinAbs(2.0, 1e-9));
}

TEST_CASE("phi on closed forms") {
    CHECK_THAT(compute_phi(make_pair("1", "t"), 1.0), WithinAbs(std::numbers::e - 1.0, 1e-10));
    CHECK_THAT(compute_phi(make_pair("0", "t"), 7.0), WithinAbs(7.0, 1e-10 * 7.0));
    CHECK_THAT(compute_phi(make_pair("2*t/(1+t^2)", "t"), 1.0), WithinAbs(4.0 / 3.0, 1e-10));
    CHECK(compute_phi(make_pair("1", "t"), 0.0) == 0.0);
    // exp(G) with G = t^m, m = 0.5: phi(1) = int_0^1 exp(sqrt t) dt = 2
    CHECK_THAT(compute_phi(builtin_pair("power-m", {{"m", 0.5}, {"p", 1.0}}), 1.0), WithinAbs(2.0, 1e-9));
}

TEST_CASE("phi agrees with quadrature of exp(G)") {
    const auto pair = builtin_pair("two-t-rational", {{"p", 2.0}});
    const TransformTable table(pair);
    for (double t : {0.1, 0.9, 3.0, 12.0}) {
        const double expect = t + t * t * t / 3.0;
        CHECK_THAT(table.phi(t), WithinAbs(expect, 1e-10 * std::max(1.0, expect)));
        CHECK_THAT(table.G(t), WithinAbs(std::log1p(t * t), 1e-10 * std::max(1.0, std::log1p(t * t))));
    }
}

TEST_CASE("overflow of exp(G) names the threshold") {
    // G = t^2 passes 700 at t = sqrt(700)
    const auto pair = make_pair("2*t", "t");
    try {
        compute_phi(pair, 40.0);
        FAIL("expected overflow");
    } catch (const OverflowError& e) {
        CHECK_THAT(e.threshold(), WithinAbs(std::sqrt(700.0), 1e-3));
    }
    const TransformTable table(pair);
    REQUIRE(table.overflow_threshold().has_value());
    CHECK_NOTHROW(table.phi(20.0));
    CHECK_THROWS_AS(table.phi(30.0), OverflowError);
}

TEST_CASE("inversion of phi") {
    const auto one = make_pair("1", "t");
    CHECK(invert_phi(one, 0.0) == 0.0);
    CHECK_THAT(invert_phi(one, std::numbers::e - 1.0), WithinAbs(1.0, 1e-10));
    CHECK_THROWS_AS(invert_phi(one, -1.0), InvalidInput);
    const TransformTable table(one);
    for (double v : {1e-9, 1e-3, 0.5, 10.0, 1e6, 1e15})
        CHECK_THAT(table.phi_inv(v), WithinRel(std::log1p(v), 1e-10));
    // values far beyond the cached grid
    CHECK_THAT(table.phi_inv(1e25), WithinRel(std::log1p(1e25), 1e-10));
}

TEST_CASE("phi inverse roundtrip on random points") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0.0, 10.0);
    for (const auto& pair : {builtin_pair("two-t-rational", {{"p", 2.0}}),
                             builtin_pair("regular-log", {{"p", 1.5}}),
                             builtin_pair("power-m", {{"m", 0.5}, {"p", 1.0}}),
                             builtin_pair("sinh-cosh", {{"p", 2.0}})}) {
        const TransformTable table(pair);
        for (int i = 0; i < 100; ++i) {
            const double s = U(rng);
            CHECK_THAT(table.phi_inv(table.phi(s)), WithinAbs(s, 1e-8));
        }
    }
}

TEST_CASE("transformed nonlinearity on hand-simplified pairs") {
    CHECK_THAT(transformed_h(builtin_pair("exp-one", {{"a", 1.0}, {"p", 2.0}}), 3.0), WithinAbs(9.0, 1e-8));
    const TransformTable rl(builtin_pair("regular-log", {{"p", 1.5}}));
    for (double s : {0.5, 1.0, 10.0}) CHECK_THAT(rl.h(s), WithinAbs(std::pow(s, 1.5), 1e-7));
    CHECK_THAT(transformed_h(builtin_pair("proto-uniq", {{"p", 3.0}}), 2.0), WithinAbs(6.0, 1e-7));
    const TransformTable pl(builtin_pair("proto-logistic", {{"p", 2.0}}));
    for (double s : {0.1, 1.0, 5.0}) CHECK_THAT(pl.h(s), WithinAbs(-s + s * s, 1e-7 * std::max(1.0, s * s)));
}

TEST_CASE("g = 0 collapses the transform") {
    const auto lin = make_pair("0", "3*t - t^2");
    const TransformTable table(lin);
    for (double s : {0.0, 0.25, 1.0, 4.0, 9.5}) {
        CHECK_THAT(table.G(s), WithinAbs(0.0, 1e-14));
        CHECK_THAT(table.phi(s), WithinAbs(s, 1e-10 * std::max(1.0, s)));
        CHECK_THAT(table.h(s), WithinAbs(3 * s - s * s, 1e-9 * std::max(1.0, s * s)));
    }
}

TEST_CASE("grid is monotone, phi convex, and h(0) = 0 when f(0) = 0") {
    for (const auto& pair : {builtin_pair("two-t-rational", {{"p", 2.0}}),
                             builtin_pair("texp", {{"mu", 1.0}}),
                             builtin_pair("tanh-psi", {{"p", 2.0}})}) {
        const TransformTable table(pair);
        const auto grid = table.grid();
        REQUIRE(grid.size() > 3);
        CHECK(grid[0].t == 0.0);
        CHECK(grid[0].G == 0.0);
        CHECK(grid[0].phi == 0.0);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            CHECK(grid[i].t > grid[i - 1].t);
            CHECK(grid[i].phi > grid[i - 1].phi);
            CHECK(grid[i].G >= grid[i - 1].G - 1e-12);
        }
        double prev = 0.0, prev2 = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double v = table.phi(0.05 * i);
            if (i >= 2) CHECK(v - 2 * prev + prev2 >= -1e-10 * std::max(1.0, v));
            prev2 = prev;
            prev = v;
        }
        CHECK(table.h(0.0) == 0.0);
    }
}

TEST_CASE("h(s)/s at s = phi(t) equals exp(G) f / phi at t") {
    const auto pair = builtin_pair("mu-over-1+t", {{"mu", 2.0}, {"p", 2.0}});
    const TransformTable table(pair);
    for (double t : {0.1, 1.0, 3.0, 8.0}) {
        const auto pt = table.at(t);
        const double lhs = table.h(pt.phi) / pt.phi;
        const double rhs = std::exp(pt.G) * table.f(t) / pt.phi;
        CHECK_THAT(lhs, WithinRel(rhs, 1e-8));
    }
}

TEST_CASE("limit estimates") {
    CHECK(estimate_limit({1, 2}).trend == Trend::Insufficient);
    const auto c = estimate_limit({5, 4, 3.1, 3.01, 3.001});
    CHECK(c.trend == Trend::Converged);
    CHECK(c.value == 3.001);
    CHECK(estimate_limit({1, 10, 100, 1000}).trend == Trend::DivergingUp);
    CHECK(estimate_limit({-1, -10, -100, -1000}).trend == Trend::DivergingDown);
    CHECK(estimate_limit({1, 0.1, 0.01, 0.001}).trend == Trend::Vanishing);
    CHECK(estimate_limit({1, 3, 1, 3}).trend == Trend::Unstable);
}

TEST_CASE("growth classification of simple pairs") {
    const double mu1 = 10.0;
    const auto sub = classify_growth(builtin_pair("power-m", {{"m", 1.0}, {"p", 0.5}}), mu1);
    CHECK(sub.growth == GrowthClass::Sublinear);
    CHECK(sub.heuristic);

    const auto sup = classify_growth(
        builtin_pair("power-m-super", {{"m", 1.0}, {"q", 2.0}, {"nu", 0.5 * mu1}}), mu1);
    CHECK(sup.growth == GrowthClass::Superlinear);
    REQUIRE(sup.c_star.has_value());
    CHECK_THAT(*sup.c_star, WithinRel(0.5 * mu1, 1e-3));

    const auto lin = classify_growth(make_pair("0", "2*m1*t", {{"m1", mu1}}), mu1);
    CHECK(lin.growth == GrowthClass::Neither);
    CHECK_THAT(lin.at_zero.value, WithinRel(2 * mu1, 1e-9));
    CHECK_THAT(lin.at_infinity.value, WithinRel(2 * mu1, 1e-9));

    CHECK_THROWS_AS(classify_growth(make_pair("0", "t"), 0.0), InvalidInput);
}

TEST_CASE("growth report records power ratio and lower-bound violations") {
    GrowthOptions opts;
    opts.p = 2.0;
    opts.gamma = 0.5;
    const auto rep = classify_growth(builtin_pair("exp-one", {{"p", 2.0}}), 5.0, opts);
    REQUIRE(rep.C_star.has_value());
    CHECK_THAT(*rep.C_star, WithinRel(1.0, 1e-6));
    REQUIRE(rep.max_lower_bound_violation.has_value());
    CHECK(*rep.max_lower_bound_violation <= 0.0);
    CHECK(rep.f_at_zero == 0.0);
}
