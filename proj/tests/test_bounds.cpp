#include <cmath>
#include <vector>

#include "bellman/backup_ops.hpp"
#include "bellman/bounds.hpp"
#include "bellman/rng.hpp"
#include "doctest.h"

using namespace bellman;

TEST_CASE("q_value_bounds scales the reward range by 1/(1-gamma)") {
    const ValueBounds b = q_value_bounds(-1.0, 1.0, 0.9);
    CHECK(b.q_min == doctest::Approx(-10.0));
    CHECK(b.q_max == doctest::Approx(10.0));
    const ValueBounds z = q_value_bounds(0.0, 0.0, 0.3);
    CHECK(z.q_min == 0.0);
    CHECK(z.q_max == 0.0);
    const ValueBounds g = q_value_bounds(0.0, 1.0, 0.5);
    CHECK(g.q_max == doctest::Approx(2.0));
    CHECK_THROWS_AS(q_value_bounds(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(q_value_bounds(1.0, 0.0, 0.9), std::invalid_argument);
}

TEST_CASE("pairwise_gap_bound closed forms") {
    CHECK(pairwise_gap_bound(1.0, 0.9) == doctest::Approx(20.0));
    CHECK(pairwise_gap_bound(0.0, 0.5) == 0.0);
    CHECK(pairwise_gap_bound(2.0, 0.5) == doctest::Approx(8.0));
    CHECK_THROWS_AS(pairwise_gap_bound(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("gap_lower_bound closed forms") {
    CHECK(gap_lower_bound(1.0, 2, 1.0) ==
          doctest::Approx(1.0 / (2.0 * std::exp(1.0))).epsilon(1e-12));
    CHECK(gap_lower_bound(1.0, 2, 0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(gap_lower_bound(0.0, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gap_lower_bound(1.0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("gap_lower_bound sits below the realized two-action gap") {
    const std::vector<double> row = {1.0, 0.0};
    CHECK(gap_lower_bound(delta_hat(row), 2, 1.0) <= gap(row, 1.0));
}

TEST_CASE("gap_upper_bound closed forms and branch selection") {
    CHECK(gap_upper_bound(2, 1.0, 10.0) ==
          doctest::Approx(20.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
    CHECK(gap_upper_bound(2, 0.0, 0.0) == doctest::Approx(0.5));
    CHECK(gap_upper_bound(5, 100.0, 10.0) == doctest::Approx(4.0 / 102.0));
    CHECK_THROWS_AS(gap_upper_bound(1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gap_upper_bound(2, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gap_upper_bound is nonincreasing in tau and vanishes at huge tau") {
    double prev = 1e300;
    for (double tau : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4, 1e6}) {
        const double b = gap_upper_bound(4, tau, 5.0);
        CHECK(b <= prev + 1e-15);
        prev = b;
    }
    CHECK(gap_upper_bound(4, 1e6, 5.0) <= 3.0 / 1e6 + 1e-12);
}

TEST_CASE("performance_lower_bound closed forms") {
    // loose small-tau case from the two-action example
    const double ub = gap_upper_bound(2, 1.0, 10.0);
    CHECK(performance_lower_bound(5.0, 0.9, 2, 1.0, 10.0) ==
          doctest::Approx(5.0 - 9.0 * ub).epsilon(1e-12));
    CHECK(performance_lower_bound(5.0, 0.9, 2, 1.0, 10.0) ==
          doctest::Approx(-43.409).epsilon(1e-3));
    // huge-tau surrogate: the bound approaches Q*
    CHECK(performance_lower_bound(5.0, 0.9, 2, 1e6, 10.0) ==
          doctest::Approx(5.0).epsilon(1e-4));
    CHECK(performance_lower_bound(0.0, 0.5, 2, 0.0, 0.0) == doctest::Approx(-0.5));
}

TEST_CASE("zeta_accumulation_bound is the discounted geometric partial sum") {
    CHECK(zeta_accumulation_bound(0, 0.9, 3.0) == 0.0);
    CHECK(zeta_accumulation_bound(1, 0.9, 1.0) == doctest::Approx(0.9));
    CHECK(zeta_accumulation_bound(1000, 0.9, 1.0) ==
          doctest::Approx(9.0).epsilon(1e-10));
    CHECK_THROWS_AS(zeta_accumulation_bound(-1, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(zeta_accumulation_bound(1, 0.9, -1.0), std::invalid_argument);
}

TEST_CASE("zeta_accumulation_bound is nondecreasing in k with limit zeta*gamma/(1-gamma)") {
    double prev = -1.0;
    for (int k = 0; k <= 200; k += 10) {
        const double b = zeta_accumulation_bound(k, 0.9, 2.0);
        CHECK(b >= prev);
        prev = b;
    }
    CHECK(prev <= 2.0 * 0.9 / 0.1 + 1e-12);
    CHECK(zeta_accumulation_bound(10000, 0.9, 2.0) ==
          doctest::Approx(18.0).epsilon(1e-10));
}

TEST_CASE("exponential_rate_bound closed forms") {
    const std::vector<double> zeros = {0.0, 0.0};
    CHECK(exponential_rate_bound(100, 0.9, 2.0, zeros) == 0.0);
    const std::vector<double> one = {1.0};
    CHECK(exponential_rate_bound(10000, 0.9, 2.0, one) ==
          doctest::Approx(9.0 * std::exp(-2.0)).epsilon(1e-9));
    const double b2 = exponential_rate_bound(10000, 0.9, 2.0, one);
    const double b4 = exponential_rate_bound(10000, 0.9, 4.0, one);
    CHECK(b4 == doctest::Approx(b2 * std::exp(-2.0)).epsilon(1e-12));
    const std::vector<double> bad = {-0.5};
    CHECK_THROWS_AS(exponential_rate_bound(1, 0.9, 1.0, bad), std::invalid_argument);
}

TEST_CASE("exponential_rate_bound strictly decreases in tau when some delta is positive") {
    const std::vector<double> deltas = {0.0, 0.3, 1.2};
    double prev = 1e300;
    for (double tau : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double b = exponential_rate_bound(200, 0.9, tau, deltas);
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("gap sandwich holds on random rows across m and tau") {
    SplitMix64 rng(seed_split(99, "bounds/sandwich"));
    const double q_max = 1.0;
    for (int m = 2; m <= 10; ++m) {
        for (double tau : {0.1, 1.0, 5.0, 10.0, 100.0}) {
            std::vector<double> row(m);
            for (int t = 0; t < 2000; ++t) {
                for (auto& x : row) x = rng.uniform(-q_max, q_max);
                const double dh = delta_hat(row);
                const double g = gap(row, tau);
                if (dh <= 0.0) {
                    CHECK(g == 0.0);
                    continue;
                }
                CHECK(g >= gap_lower_bound(dh, m, tau) - 1e-12);
                CHECK(g <= gap_upper_bound(m, tau, q_max) + 1e-12);
            }
        }
    }
}
