#include <catch2/catch_amalgamated.hpp>

#include "epct/rng.hpp"
#include "epct/types.hpp"

using namespace epct;

TEST_CASE("gradient decomposition on simple matrices") {
    auto g = decompose_gradient({1, 0, 0, 1});
    CHECK(g.d == 2.0);
    CHECK(g.omega == 0.0);
    CHECK(g.eta == 0.0);
    CHECK(g.xi == 0.0);

    // pure rotation [[0,-1],[1,0]]
    g = decompose_gradient({0, -1, 1, 0});
    CHECK(g.d == 0.0);
    CHECK(g.omega == 2.0);
    CHECK(g.eta == 0.0);
    CHECK(g.xi == 0.0);

    // direct arithmetic for [[1,2],[3,4]]
    g = decompose_gradient({1, 2, 3, 4});
    CHECK(g.d == 5.0);
    CHECK(g.omega == 1.0);
    CHECK(g.eta == -3.0);
    CHECK(g.xi == 5.0);
}

TEST_CASE("decompose/reconstruct round-trips 1000 random matrices") {
    Rng rng(123);
    for (int k = 0; k < 1000; ++k) {
        Mat2 m{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10),
               rng.uniform(-10, 10)};
        const Mat2 r = reconstruct_gradient(decompose_gradient(m));
        CHECK(r.a11 == Catch::Approx(m.a11).margin(1e-14));
        CHECK(r.a12 == Catch::Approx(m.a12).margin(1e-14));
        CHECK(r.a21 == Catch::Approx(m.a21).margin(1e-14));
        CHECK(r.a22 == Catch::Approx(m.a22).margin(1e-14));
    }
}

TEST_CASE("polynomial threshold constants validate just above the explicit bound") {
    const double m1 = 1.5, n1 = 2.8, n2 = 1.5, N = 0.5, s = 1.0, M = 2.0;
    const double bound = poly_m2_lower_bound(m1, n1, n2, N, M, s);
    // oracle: the three-term maximum evaluated directly
    const double t2 = std::pow((m1 * n1 + M * m1 * m1 * n1 + n1 * n1) / (m1 * m1), 1.0 / (1.0 - N));
    const double t3 = std::pow(n1 / (2 * m1) * (1 + std::sqrt(5.0)), 1.0 / (M - N - s));
    CHECK(bound == Catch::Approx(std::max({n2, t2, t3})));

    const auto p = make_threshold_params(m1, bound * 1.01, n1, n2, M, N, s, Envelope::Polynomial);
    CHECK(p.m_star() == Catch::Approx(m1 * std::pow(bound * 1.01, M)));

    // m2 exactly at the bound must be rejected (strict inequality)
    CHECK_THROWS_AS(make_threshold_params(m1, bound, n1, n2, M, N, s, Envelope::Polynomial),
                    ValidationError);
}

TEST_CASE("violations are reported by name, all of them") {
    try {
        make_threshold_params(1.0, 121.13, 2.8, 1.5, 2.0, 0.5, 1.0, Envelope::Polynomial);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        // m1 = 1 < sqrt(2) is listed; the m2 bound grows with 1/m1^2 and is
        // listed too, since every violated inequality is reported
        bool has_m1 = false;
        for (const auto& v : e.violations) {
            if (v.name == "m1 > sqrt(2)") {
                has_m1 = true;
                CHECK(v.lhs == 1.0);
            }
        }
        CHECK(has_m1);
    }

    // several simultaneous violations all appear
    try {
        make_threshold_params(1.0, 0.5, 1.0, 0.5, 0.1, 2.0, 0.5, Envelope::Polynomial);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.violations.size() >= 4);
    }
}

TEST_CASE("exponential threshold conditions") {
    // M > m2 sqrt(2) holds: 5 > 3*1.414..., and the n2 bound is tiny here
    const double bound = exp_n2_lower_bound(1.5, 1.0, -1.0, 5.0);
    CHECK(bound == Catch::Approx(std::max(1.0, std::pow((1.0 / 3.0) * (1 + std::sqrt(5.0)), 0.2))));
    CHECK_NOTHROW(make_threshold_params(1.5, 3.0, 1.0, 2.0, 5.0, -1.0, 1.0, Envelope::Exponential));

    // M below m2*sqrt(2) must fail
    try {
        make_threshold_params(1.5, 3.0, 1.0, 2.0, 4.0, -1.0, 1.0, Envelope::Exponential);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations.size() == 1);
        CHECK(e.violations[0].name == "M > m2*sqrt(2)");
    }
}

TEST_CASE("validation is monotone in m2 for the polynomial case") {
    const auto base =
        make_threshold_params(1.5, 121.13, 2.8, 1.5, 2.0, 0.5, 1.0, Envelope::Polynomial);
    for (double factor : {1.5, 3.0, 10.0, 1e3}) {
        ThresholdParams p = base;
        p.m2 = base.m2 * factor;
        CHECK(validate_threshold_params(p).empty());
    }
}

TEST_CASE("envelope lower bounds start at -1 and stay below the upper bound") {
    const auto poly = EnvelopeSpec::polynomial(2.0, 1.0);
    const auto expo = EnvelopeSpec::exponential(1.0);
    CHECK(poly.lower(0.0) == -1.0);
    CHECK(expo.lower(0.0) == -1.0);
    CHECK(poly.upper == Catch::Approx(0.5));
    for (double t : {0.0, 0.5, 3.0, 10.0}) {
        CHECK(poly.lower(t) <= poly.upper);
        CHECK(expo.lower(t) <= expo.upper);
        CHECK(expo.lower(t) <= expo.lower(t * 0.5));  // decreasing
    }
}

TEST_CASE("scalar fields require power-of-two grids") {
    CHECK_THROWS_AS(ScalarField2D(48, 64, 1.0, 1.0), std::invalid_argument);
    ScalarField2D f(8, 16, 2.0, 4.0);
    f.fill([](double x, double y) { return x + y; });
    CHECK(f(1, 2) == Catch::Approx(2.0 / 8 + 4.0 * 2 / 16));
    CHECK(f.max_abs() > 0.0);
}
