#include <doctest.h>

#include <cmath>
#include <string>

#include "screenlap/errors.hpp"
#include "screenlap/expsum.hpp"

using namespace screenlap;

TEST_CASE("single-term grid reproduces one exponential") {
    const auto v = expsum::build(1.0, 0, 0);
    REQUIRE(v.terms.size() == 1);
    CHECK(v.terms[0].weight == 1.0);
    CHECK(v.terms[0].rate == 1.0);
    for (double r : {0.0, 0.5, 1.0, 3.0})
        CHECK(expsum::eval(v, r) == doctest::Approx(std::exp(-r)).epsilon(1e-15));
}

TEST_CASE("value at zero matches the geometric closed form") {
    const double h = 0.7;
    const int k1 = -3, k2 = 12;
    const auto v = expsum::build(h, k1, k2);
    REQUIRE(int(v.terms.size()) == k2 - k1 + 1);
    const double q = std::exp(-h);
    const double exact =
        h * (std::exp(-k1 * h) - std::exp(-(k2 + 1) * h)) / (1.0 - q);
    CHECK(expsum::eval(v, 0.0) == doctest::Approx(exact).epsilon(1e-14));
    // empty grid
    CHECK(expsum::build(1.0, 3, 2).terms.empty());
    CHECK(expsum::eval(expsum::build(1.0, 3, 2), 1.0) == 0.0);
    CHECK_THROWS_AS(expsum::build(0.0, 0, 1), input_error);
}

TEST_CASE("terms are stored with strictly descending rates") {
    const auto v = expsum::build(0.5, -4, 9);
    for (std::size_t i = 1; i < v.terms.size(); ++i) {
        CHECK(v.terms[i].rate < v.terms[i - 1].rate);
        CHECK(v.terms[i].weight > 0.0);
    }
    REQUIRE(v.provenance.has_value());
    CHECK(v.provenance->h == 0.5);
    CHECK(v.provenance->k1 == -4);
    CHECK(v.provenance->k2 == 9);
    CHECK(v.provenance->mu == 1.0);
}

TEST_CASE("the window form equals r * v(r)") {
    const auto v = expsum::build(1.0, -2, 50);
    for (double r : {1.0, 10.0, 123.0, 4.56e7, 9.9e15}) {
        const double direct = r * expsum::eval(v, r);
        const double window = expsum::window_value(1.0, -2, 50, std::log(r));
        CHECK(std::abs(direct - window) <= 1e-14 * std::max(1.0, std::abs(window)));
    }
    const auto report = expsum::rel_error_sup_on(v, 10.0, 1e17);
    CHECK(report.max_form_gap <= 1e-13);
}

TEST_CASE("window is nearly periodic deep inside a saturated grid") {
    const double h = 1.0;
    for (double s = 10.0; s <= 38.0; s += 0.37) {
        const double a = expsum::window_value(h, -20, 80, s);
        const double b = expsum::window_value(h, -20, 80, s + h);
        CHECK(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("reference grid meets the published accuracy") {
    const auto v = expsum::build(1.0, -2, 50);
    const auto report = expsum::rel_error_sup(v, 1e17);
    // measured on [1, R]; the certified claim applies away from the fringes
    const auto interior = expsum::rel_error_sup_on(v, 10.0, 1e17);
    CHECK(interior.sup_error <= 7e-4);
    CHECK(interior.sup_error > 5e-4);  // periodization noise floor for h=1
    CHECK(report.grid_points >= 40);
    CHECK(interior.argmax_r >= 10.0);
    CHECK(interior.argmax_r <= 1e17);
    CHECK_THROWS_AS(expsum::rel_error_sup_on(v, 10.0, 5.0), input_error);
}

TEST_CASE("rescale shifts the approximation interval") {
    const auto base = expsum::build(1.0, -2, 50);
    const double mu = 10.0;
    const auto scaled = expsum::rescale(base, mu);
    REQUIRE(scaled.provenance.has_value());
    CHECK(scaled.provenance->mu == 10.0);
    for (double r : {1.0, 7.0, 300.0})
        CHECK(expsum::eval(scaled, mu * r) ==
              doctest::Approx(expsum::eval(base, r) / mu).epsilon(1e-15));
    // relative error profile is carried along exactly
    const auto e_base = expsum::rel_error_sup_on(base, 10.0, 1e6, 1000);
    const auto e_scaled = expsum::rel_error_sup_on(scaled, 10.0 * mu, 1e6 * mu, 1000);
    CHECK(e_base.sup_error == doctest::Approx(e_scaled.sup_error).epsilon(1e-12));
    CHECK_THROWS_AS(expsum::rescale(base, 0.0), input_error);
}

TEST_CASE("parameter search certifies itself") {
    for (double tol : {1e-2, 1e-3, 1e-4}) {
        const auto grid = expsum::suggest_params(1.0, 1e18, tol);
        const auto v = expsum::rescale(expsum::build(grid.h, grid.k1, grid.k2), 1.0);
        const auto report = expsum::rel_error_sup_on(v, 10.0, 1e17);
        CHECK(report.sup_error <= tol);
        CHECK(int(v.terms.size()) <= 512);
    }
    // a loose tolerance needs only a handful of terms
    const auto loose = expsum::suggest_params(1.0, 1e4, 0.5);
    CHECK(loose.k2 - loose.k1 + 1 <= 24);
}

TEST_CASE("search parameters do not depend on mu") {
    const auto a = expsum::suggest_params(1.0, 1e12, 1e-3);
    const auto b = expsum::suggest_params(1e3, 1e12, 1e-3);
    const auto c = expsum::suggest_params(2.5e-4, 1e12, 1e-3);
    CHECK(a.h == b.h);
    CHECK(a.k1 == b.k1);
    CHECK(a.k2 == c.k2);
    CHECK(b.h == c.h);
}

TEST_CASE("search failures raise the right errors") {
    CHECK_THROWS_AS(expsum::suggest_params(1.0, 1e60, 1e-10), capacity_error);
    CHECK_THROWS_AS(expsum::suggest_params(-1.0, 1e6, 1e-3), input_error);
    CHECK_THROWS_AS(expsum::suggest_params(1.0, 50.0, 1e-3), input_error);
    CHECK_THROWS_AS(expsum::suggest_params(1.0, 1e6, 2.0), input_error);
    CHECK_THROWS_AS(expsum::suggest_params(1.0, 1e6, 1e-13), input_error);
}

TEST_CASE("csv round trip preserves terms and provenance") {
    const auto v = expsum::rescale(expsum::build(0.5, -1, 30), 2.0);
    const std::string text = expsum::to_csv(v);
    const auto back = expsum::from_csv(text);
    REQUIRE(back.terms.size() == v.terms.size());
    for (std::size_t i = 0; i < v.terms.size(); ++i) {
        CHECK(back.terms[i].weight == v.terms[i].weight);
        CHECK(back.terms[i].rate == v.terms[i].rate);
    }
    REQUIRE(back.provenance.has_value());
    CHECK(back.provenance->h == 0.5);
    CHECK(back.provenance->k1 == -1);
    CHECK(back.provenance->k2 == 30);
    CHECK(back.provenance->mu == 2.0);
}

TEST_CASE("csv parsing rejects malformed input") {
    CHECK_THROWS_AS(expsum::from_csv(""), input_error);
    CHECK_THROWS_AS(expsum::from_csv("weight,rate\nabc,1.0\n"), input_error);
    CHECK_THROWS_AS(expsum::from_csv("weight,rate\n1.0\n"), input_error);
    CHECK_THROWS_AS(expsum::from_csv("weight,rate\n1.0,2.0,3.0\n"), input_error);
}
