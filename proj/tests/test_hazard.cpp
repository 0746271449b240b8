#include <cmath>
#include <vector>

#include "doctest.h"

#include "clustab/error.hpp"
#include "clustab/hazard.hpp"

using namespace clustab;

TEST_SUITE_BEGIN("hazard");

TEST_CASE("single tenor bootstraps the credit-triangle flat hazard") {
    const HazardCurve c = spreads_to_hazard({100.0}, {5.0}, 0.4);
    REQUIRE(c.hazards.size() == 1);
    CHECK(c.hazards[0] == doctest::Approx(0.01 / 0.6).epsilon(1e-12));
    CHECK(c.hazards[0] == doctest::Approx(0.016667).epsilon(1e-4));
}

TEST_CASE("flat spread curves give equal hazards on every interval") {
    const HazardCurve c = spreads_to_hazard({150, 150, 150, 150, 150},
                                            {1, 3, 5, 7, 10}, 0.4);
    const double lambda0 = c.hazards[0];
    for (double h : c.hazards) CHECK(h == lambda0);
    CHECK(lambda0 == doctest::Approx(0.015 / 0.6).epsilon(1e-12));
}

TEST_CASE("two-tenor bootstrap backs out the forward hazard") {
    const HazardCurve c = spreads_to_hazard({200, 100}, {1, 5}, 0.4);
    REQUIRE(c.hazards.size() == 2);
    CHECK(c.hazards[0] == doctest::Approx(0.02 / 0.6).epsilon(1e-12));
    // (0.016667*5 - 0.033333*1) / 4 = 0.0125
    CHECK(c.hazards[1] == doctest::Approx(0.0125).epsilon(1e-9));
}

TEST_CASE("sharply inverted curves error by default and floor on request") {
    // 5y cumulative hazard below the 1y one implies a negative forward hazard
    const std::vector<double> spreads = {500, 50};
    const std::vector<double> tenors = {1, 5};
    CHECK_THROWS_WITH_AS(spreads_to_hazard(spreads, tenors, 0.4),
                         doctest::Contains("inverted"), Error);
    const HazardCurve c = spreads_to_hazard(spreads, tenors, 0.4, true);
    CHECK(c.hazards[1] == 1e-6);
    // the quoted cumulative hazard at the last tenor is preserved for
    // later intervals regardless of flooring, so survival stays consistent
    // with the next quote on longer curves
    const HazardCurve d = spreads_to_hazard({500, 50, 100}, {1, 5, 10}, 0.4, true);
    CHECK(d.hazards[1] == 1e-6);
    CHECK(d.hazards[2] ==
          doctest::Approx((0.01 / 0.6 * 10 - 0.005 / 0.6 * 5) / 5).epsilon(1e-12));
}

TEST_CASE("bootstrap validates its inputs") {
    CHECK_THROWS_AS(spreads_to_hazard({}, {}, 0.4), Error);
    CHECK_THROWS_AS(spreads_to_hazard({100, 100}, {1}, 0.4), Error);
    CHECK_THROWS_AS(spreads_to_hazard({100}, {0.0}, 0.4), Error);
    CHECK_THROWS_AS(spreads_to_hazard({100, 100}, {5, 1}, 0.4), Error);
    CHECK_THROWS_AS(spreads_to_hazard({-5}, {1}, 0.4), Error);
    CHECK_THROWS_AS(spreads_to_hazard({100}, {1}, 1.0), Error);
    CHECK_THROWS_AS(spreads_to_hazard({100}, {1}, -0.1), Error);
}

TEST_CASE("survival and density follow the piecewise-exponential form") {
    HazardCurve c;
    c.tenors = {1.0, 3.0};
    c.hazards = {0.02, 0.05};
    c.validate();
    CHECK(c.survival(0.0) == 1.0);
    CHECK(c.survival(0.5) == doctest::Approx(std::exp(-0.01)).epsilon(1e-12));
    CHECK(c.survival(1.0) == doctest::Approx(std::exp(-0.02)).epsilon(1e-12));
    CHECK(c.survival(2.0) == doctest::Approx(std::exp(-0.02 - 0.05)).epsilon(1e-12));
    // last hazard extends flat beyond the final tenor
    CHECK(c.survival(10.0) ==
          doctest::Approx(std::exp(-0.02 - 0.05 * 9.0)).epsilon(1e-12));
    CHECK(c.hazard_at(0.5) == 0.02);
    CHECK(c.hazard_at(2.0) == 0.05);
    CHECK(c.hazard_at(300.0) == 0.05);
    CHECK(c.density(2.0) == doctest::Approx(0.05 * c.survival(2.0)).epsilon(1e-12));
}

TEST_CASE("the default density integrates to one") {
    HazardCurve c;
    c.tenors = {1.0, 5.0};
    c.hazards = {0.03, 0.01};
    c.validate();
    // integral of f over [0, horizon] = 1 - S(horizon) -> 1
    const double horizon = c.time_to_survival(1e-12);
    CHECK(1.0 - c.survival(horizon) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("time_to_survival inverts survival") {
    HazardCurve c;
    c.tenors = {2.0};
    c.hazards = {0.04};
    c.validate();
    for (double s : {0.9, 0.5, 0.01}) {
        CHECK(c.survival(c.time_to_survival(s)) == doctest::Approx(s).epsilon(1e-9));
    }
    CHECK(c.time_to_survival(1.0) == 0.0);
    CHECK_THROWS_AS(c.time_to_survival(0.0), Error);
    CHECK_THROWS_AS(c.time_to_survival(1.5), Error);
}

TEST_CASE("term-structure distance is zero between identical curves") {
    const HazardCurve c = spreads_to_hazard({120, 110, 100}, {1, 3, 5}, 0.4);
    CHECK(term_structure_distance(c, c) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("flat curves give the closed-form angle") {
    HazardCurve a, b;
    a.tenors = {1.0};
    a.hazards = {0.01};
    b.tenors = {1.0};
    b.hazards = {0.04};
    // cos(phi) = 2 sqrt(l1 l2) / (l1 + l2) = 2*0.02/0.05 = 0.8
    const double phi = term_structure_distance(a, b);
    CHECK(std::cos(phi) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(phi == doctest::Approx(std::acos(0.8)).epsilon(1e-9));
    CHECK(phi == doctest::Approx(0.6435).epsilon(1e-3));
}

TEST_CASE("vanishing hazard separates curves toward a right angle") {
    HazardCurve a, b;
    a.tenors = {1.0};
    a.hazards = {0.01};
    b.tenors = {1.0};
    double last = 0.0;
    for (double l2 : {1e-3, 1e-5, 1e-7, 1e-9}) {
        b.hazards = {l2};
        const double phi = term_structure_distance(a, b);
        CHECK(phi > last);  // monotone approach
        last = phi;
    }
    CHECK(last > 3.14159 / 2.0 - 0.01);
}

TEST_CASE("distance is symmetric and positive for distinct curves") {
    const HazardCurve a = spreads_to_hazard({80, 90, 100}, {1, 3, 5}, 0.4);
    const HazardCurve b = spreads_to_hazard({300, 280, 260}, {1, 3, 5}, 0.4);
    const double ab = term_structure_distance(a, b);
    const double ba = term_structure_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab > 0.0);
    CHECK(ab <= 3.14159265358979 / 2.0);
}

TEST_CASE("curve validation rejects malformed curves") {
    HazardCurve c;
    c.tenors = {1.0, 3.0};
    c.hazards = {0.02, 0.05};
    CHECK_NOTHROW(c.validate());
    SUBCASE("size mismatch") {
        c.hazards.pop_back();
        CHECK_THROWS_AS(c.validate(), Error);
    }
    SUBCASE("non-increasing tenors") {
        c.tenors = {3.0, 1.0};
        CHECK_THROWS_AS(c.validate(), Error);
    }
    SUBCASE("non-positive hazard") {
        c.hazards[0] = 0.0;
        CHECK_THROWS_AS(c.validate(), Error);
    }
    SUBCASE("recovery out of range") {
        c.recovery = 1.0;
        CHECK_THROWS_AS(c.validate(), Error);
    }
}

TEST_SUITE_END();
