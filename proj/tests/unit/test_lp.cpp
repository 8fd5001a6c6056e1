#include "mtd/lp.hpp"
#include "mtd/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace mtd;

static double f64_nan() { return std::numeric_limits<double>::quiet_NaN(); }

TEST_SUITE("lp") {

TEST_CASE("single variable vertex") {
    LpProblem lp;
    lp.objective = {-1};
    lp.add_row({1}, 5);
    lp.lower = {0};
    lp.upper = {kLpInfinity};
    const auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(5));
    CHECK(s.objective_value == doctest::Approx(-5));
}

TEST_CASE("optimum on a face") {
    LpProblem lp;
    lp.objective = {-1, -1};
    lp.add_row({1, 1}, 1);
    lp.lower = {0, 0};
    lp.upper = {kLpInfinity, kLpInfinity};
    const auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(-1));
    CHECK(s.x[0] + s.x[1] == doctest::Approx(1));
    CHECK(oracle::enumerate_vertices(lp).objective == doctest::Approx(-1));
}

TEST_CASE("infeasible and unbounded") {
    LpProblem lp;
    lp.objective = {1};
    lp.add_row({1}, -1);
    lp.lower = {0};
    lp.upper = {kLpInfinity};
    CHECK(solve_lp(lp).status == LpStatus::infeasible);

    LpProblem u;
    u.objective = {-1, 0};
    u.add_row({-1, 1}, 2);
    CHECK(solve_lp(u).status == LpStatus::unbounded);
    CHECK(oracle::enumerate_vertices(u).status == LpStatus::unbounded);
}

TEST_CASE("free variables and negative right-hand sides") {
    // minimize x + y with x >= -3, y >= x - 1 written as rows over free variables
    LpProblem lp;
    lp.objective = {1, 1};
    lp.add_row({-1, 0}, 3);
    lp.add_row({1, -1}, 1);
    const auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(-7));
    CHECK(max_violation(lp, s.x) <= 1e-7);
}

TEST_CASE("degenerate problem terminates") {
    // classic cycling example under the textbook largest-coefficient rule
    LpProblem lp;
    lp.objective = {-0.75, 150, -0.02, 6};
    lp.add_row({0.25, -60, -0.04, 9}, 0);
    lp.add_row({0.5, -90, -0.02, 3}, 0);
    lp.add_row({0, 0, 1, 0}, 1);
    lp.lower.assign(4, 0.0);
    lp.upper.assign(4, kLpInfinity);
    const auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(-0.05));
}

TEST_CASE("malformed input is rejected") {
    LpProblem lp;
    lp.objective = {1, 1};
    lp.add_row({1}, 1);
    CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
    LpProblem b;
    b.objective = {1};
    b.lower = {2, 0};
    CHECK_THROWS_AS(solve_lp(b), std::invalid_argument);
    b.lower = {f64_nan()};
    CHECK_THROWS_AS(solve_lp(b), std::invalid_argument);
}

TEST_CASE("crossed bounds are infeasible") {
    LpProblem b;
    b.objective = {1};
    b.lower = {2};
    b.upper = {1};
    CHECK(solve_lp(b).status == LpStatus::infeasible);
    CHECK(oracle::enumerate_vertices(b).status == LpStatus::infeasible);
}

TEST_CASE("trace output") {
    LpProblem lp;
    lp.objective = {-1};
    lp.add_row({1}, 5);
    lp.lower = {0};
    lp.upper = {kLpInfinity};
    std::ostringstream os;
    LpOptions opt;
    opt.trace = &os;
    solve_lp(lp, opt);
    CHECK_FALSE(os.str().empty());
}

TEST_CASE("random boxed problems agree with vertex enumeration") {
    Rng rng(21);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(4);
        const std::size_t m = 1 + rng.uniform_index(6);
        const auto lp = oracle::random_lp(rng, n, m, true);
        const auto s = solve_lp(lp);
        const auto o = oracle::enumerate_vertices(lp);
        REQUIRE(s.status == o.status);
        if (s.status == LpStatus::optimal) {
            CHECK(s.objective_value == doctest::Approx(o.objective).epsilon(1e-6));
            CHECK(max_violation(lp, s.x) <= 1e-7);
        }
    }
}

TEST_CASE("solutions are deterministic") {
    Rng rng(4);
    const auto lp = oracle::random_lp(rng, 4, 6, false);
    const auto a = solve_lp(lp), b = solve_lp(lp);
    CHECK(a.status == b.status);
    CHECK(a.x == b.x);
    CHECK(a.pivots == b.pivots);
}

}  // TEST_SUITE
