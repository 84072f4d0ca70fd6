#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "seamsim/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace seamsim;

TEST_CASE("policy grammar") {
    auto ma = parse_policy("ma");
    CHECK(ma.kind == PolicyKind::MA);
    CHECK(ma.to_string() == "ma");

    auto ss = parse_policy("ss:3");
    CHECK(ss.kind == PolicyKind::SS);
    CHECK(ss.tau == 3);
    CHECK(ss.to_string() == "ss:3");

    auto ast = parse_policy("ast:5e7");
    CHECK(ast.kind == PolicyKind::AST);
    CHECK(ast.r_c_hz == 5e7);
    CHECK_FALSE(ast.auto_rc);

    auto astauto = parse_policy("ast:auto");
    CHECK(astauto.kind == PolicyKind::AST);
    CHECK(astauto.auto_rc);
    CHECK(astauto.to_string() == "ast:auto");

    for (const char* bad :
         {"", "ma:1", "ss", "ss:", "ss:0", "ss:-2", "ss:x", "ast", "ast:", "ast:-1", "mono",
          "skip:2", "ss:2.5"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_policy(bad), std::invalid_argument);
        try {
            parse_policy(bad);
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).rfind("invalid-policy:", 0) == 0);
        }
    }
}

TEST_CASE("tau star") {
    // Below the crossover rate the schedule stretches to (d-1)/2, at or
    // above it snaps to 2.
    CHECK(tau_star(11, 1e6, 5e7) == 5);
    CHECK(tau_star(21, 1e6, 5e7) == 10);
    CHECK(tau_star(11, 5e7, 5e7) == 2);
    CHECK(tau_star(11, 1e9, 5e7) == 2);
    CHECK(tau_star(9, 1e6, 5e7) == 4);
    CHECK(tau_star(5, 1e6, 5e7) == 2);
    CHECK(tau_star(3, 1e6, 5e7) == 1);  // degenerate: measure-all
    CHECK(tau_star(3, 1e9, 5e7) == 2);
}

TEST_CASE("round plans") {
    auto ma = plan_rounds(parse_policy("ma"), 5, 6, 2e6);
    CHECK(ma.total_rounds() == 6);
    CHECK(ma.effective_tau == 1);
    for (int t = 0; t <= 6; ++t) CHECK(ma.measure_seam[t]);

    auto ss3 = plan_rounds(parse_policy("ss:3"), 5, 6, 2e6);
    CHECK(ss3.effective_tau == 3);
    for (int t = 0; t <= 6; ++t) {
        CAPTURE(t);
        CHECK(ss3.measure_seam[t] == (t % 3 == 0));
    }

    // Round 0 is always measured, whatever tau is.
    auto ss5 = plan_rounds(parse_policy("ss:5"), 5, 3, 2e6);
    CHECK(ss5.measure_seam[0]);
    CHECK_FALSE(ss5.measure_seam[1]);
    CHECK_FALSE(ss5.measure_seam[2]);
    CHECK_FALSE(ss5.measure_seam[3]);

    // ss:1 is byte-identical to ma.
    CHECK(plan_rounds(parse_policy("ss:1"), 7, 7, 2e6) ==
          plan_rounds(parse_policy("ma"), 7, 7, 2e6));
}

TEST_CASE("adaptive plans match the static ones") {
    for (int d : {9, 11, 21}) {
        CAPTURE(d);
        const double rc = 4.2e6;
        auto below = plan_rounds(parse_policy("ast:4.2e6"), d, d, rc / 10.0);
        Policy slow;
        slow.kind = PolicyKind::SS;
        slow.tau = (d - 1) / 2;
        CHECK(below == plan_rounds(slow, d, d, rc / 10.0));

        auto above = plan_rounds(parse_policy("ast:4.2e6"), d, d, rc * 10.0);
        CHECK(above == plan_rounds(parse_policy("ss:2"), d, d, rc * 10.0));
    }
}

TEST_CASE("crossover estimation on synthetic curves") {
    std::vector<double> sweep = {1e6, 1e7, 1e8, 1e9};

    // Two power laws crossing at exactly R* = 2.5e7: solving
    // 1e-2 (R/1e6)^-0.9 = 2e-3 (R/1e6)^-0.4 gives (R/1e6)^0.5 = 5. Power
    // laws are straight lines on log-log axes, so the interpolation is
    // exact up to rounding.
    auto runner = [](double egr_hz, int tau) {
        double r = egr_hz / 1e6;
        return tau == 2 ? 1e-2 * std::pow(r, -0.9) : 2e-3 * std::pow(r, -0.4);
    };
    double rc = estimate_crossover_rate(11, sweep, runner);
    CHECK(rc == doctest::Approx(2.5e7).epsilon(1e-6));

    // tau=2 dominates everywhere: crossover collapses to the lowest rate.
    auto always2 = [](double, int tau) { return tau == 2 ? 1e-4 : 1e-3; };
    CHECK(estimate_crossover_rate(11, sweep, always2) == 1e6);

    // The long schedule dominates everywhere: sentinel +inf.
    auto never2 = [](double, int tau) { return tau == 2 ? 1e-3 : 1e-4; };
    CHECK(std::isinf(estimate_crossover_rate(11, sweep, never2)));

    CHECK_THROWS_AS(estimate_crossover_rate(11, {}, runner), std::invalid_argument);
}
