#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "screenlap/errors.hpp"
#include "screenlap/gausscalc.hpp"
#include "screenlap/philox.hpp"
#include "screenlap/quadrature.hpp"
#include "screenlap/tspace.hpp"

using namespace screenlap;
using gausscalc::GaussianSum;
using gausscalc::GaussianTerm;
using gausscalc::KernelMode;
using tspace::SystemDims;

namespace {

Eigen::MatrixXd random_spd(int d, std::uint64_t seed, double base = 0.4) {
    rng::NormalStream s(seed, 0);
    Eigen::MatrixXd W(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) W(i, j) = s.next();
    return base * Eigen::MatrixXd::Identity(d, d) + 0.2 / d * W.transpose() * W;
}

Eigen::VectorXd random_vec(int d, std::uint64_t seed, std::uint64_t index = 1) {
    rng::NormalStream s(seed, index);
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = s.next();
    return v;
}

GaussianSum isotropic_sum(int dim, double a) {
    return gausscalc::make_sum(
        dim, {gausscalc::make_term(1.0, Eigen::VectorXd::Zero(dim),
                                   a * Eigen::MatrixXd::Identity(dim, dim))});
}

}  // namespace

TEST_CASE("term validation") {
    Eigen::VectorXd c(2);
    c << 1.0, -1.0;
    Eigen::MatrixXd good(2, 2);
    good << 1.0, 0.2, 0.2, 0.8;
    CHECK_NOTHROW(gausscalc::make_term(1.0, c, good));
    Eigen::MatrixXd asym = good;
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(gausscalc::make_term(1.0, c, asym), input_error);
    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(gausscalc::make_term(1.0, c, indef), input_error);
    CHECK_THROWS_AS(gausscalc::make_term(1.0, c, Eigen::MatrixXd::Identity(3, 3)), input_error);
    CHECK_THROWS_AS(
        gausscalc::make_sum(3, {gausscalc::make_term(1.0, c, good)}), input_error);
}

TEST_CASE("fourier round trip") {
    for (int t = 0; t < 10; ++t) {
        const int d = 4;
        const auto term = gausscalc::make_term(1.3, random_vec(d, 100 + t), random_spd(d, 200 + t));
        const auto back = gausscalc::inverse_fourier(gausscalc::fourier(term));
        CHECK(back.coeff == doctest::Approx(term.coeff).epsilon(1e-12));
        CHECK((back.center - term.center).norm() <= 1e-12);
        CHECK((back.qform - term.qform).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("the standard Gaussian is self-dual") {
    Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(1);
    const auto t = gausscalc::make_term(1.0, zero1, 0.5 * Eigen::MatrixXd::Identity(1, 1));
    const auto ft = gausscalc::fourier(t);
    CHECK(ft.coeff == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ft.qform(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ft.shift.norm() == 0.0);
}

TEST_CASE("eval agrees with the defining expression") {
    const int d = 3;
    const auto term = gausscalc::make_term(0.7, random_vec(d, 300), random_spd(d, 301));
    const auto sum = gausscalc::make_sum(d, {term, term});
    for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd y = random_vec(d, 302, t);
        const Eigen::VectorXd dlt = y - term.center;
        const double expected = 2.0 * 0.7 * std::exp(-dlt.dot(term.qform * dlt));
        CHECK(gausscalc::eval(sum, y) == doctest::Approx(expected).epsilon(1e-13));
    }
    CHECK(gausscalc::eval(gausscalc::make_sum(d, {}), random_vec(d, 303)) == 0.0);
}

// Independent oracle for the whole decoupled solve path: for radial data in
// d = 3 the solution is a one-dimensional oscillatory integral.
TEST_CASE("screened solve matches a radial quadrature oracle in 3d") {
    const double mu = 1.3;
    const auto F = isotropic_sum(3, 0.5);  // exp(-|y|^2/2), self-dual
    const auto kernel = gausscalc::make_kernel(KernelMode::decoupled, mu, 1e-6, F);
    const auto U = gausscalc::apply_screened_inverse(F, kernel);

    for (double radius : {0.3, 0.8, 1.5, 2.4, 3.0}) {
        Eigen::VectorXd y(3);
        y << radius, 0.0, 0.0;
        // (2 pi)^{-3/2} * (4 pi / |y|) * int_0^inf e^{-r^2/2} r sin(r|y|) / (mu + r^2) dr
        auto integrand = [&](double r) {
            return std::exp(-0.5 * r * r) * r * std::sin(r * radius) / (mu + r * r);
        };
        const double integral = quad::integrate(integrand, 0.0, 14.0, 1e-12).value;
        const double oracle =
            std::pow(2.0 * M_PI, -1.5) * 4.0 * M_PI / radius * integral;
        CHECK(gausscalc::eval(U, y) == doctest::Approx(oracle).epsilon(2e-6));
    }
}

TEST_CASE("a single kernel term is one Gaussian factor on the transform side") {
    const int d = 2;
    const double mu = 0.9, b = 0.35;
    const auto term = gausscalc::make_term(1.1, random_vec(d, 400), random_spd(d, 401));
    const auto F = gausscalc::make_sum(d, {term});
    gausscalc::KernelSpec spec;
    spec.mode = KernelMode::decoupled;
    spec.mu = mu;
    spec.sum.terms = {{1.0, b}};
    const auto U = gausscalc::apply_screened_inverse(F, spec);
    REQUIRE(U.terms.size() == 1);

    // direct dense computation of the same composition
    const Eigen::MatrixXd A = term.qform;
    const Eigen::MatrixXd B = 0.25 * A.inverse();
    const Eigen::MatrixXd Bk = B + b * Eigen::MatrixXd::Identity(d, d);
    const double coeff = term.coeff * std::exp(-b * mu) /
                         (std::pow(2.0, d) * std::sqrt(A.determinant() * Bk.determinant()));
    const Eigen::MatrixXd qout = 0.25 * Bk.inverse();
    CHECK(U.terms[0].coeff == doctest::Approx(coeff).epsilon(1e-12));
    CHECK((U.terms[0].center - term.center).norm() <= 1e-12);
    CHECK((U.terms[0].qform - qout).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("solve is linear in the right-hand side") {
    const int d = 5;
    const auto t1 = gausscalc::make_term(0.8, random_vec(d, 500), random_spd(d, 501));
    const auto t2 = gausscalc::make_term(-0.3, random_vec(d, 502), random_spd(d, 503));
    const auto F1 = gausscalc::make_sum(d, {t1});
    const auto F2 = gausscalc::make_sum(d, {t2});
    const auto F12 = gausscalc::make_sum(d, {t1, t2});
    const auto kernel = gausscalc::make_kernel(KernelMode::decoupled, 1.0, 1e-4, F12);
    const auto U1 = gausscalc::apply_screened_inverse(F1, kernel);
    const auto U2 = gausscalc::apply_screened_inverse(F2, kernel);
    const auto U12 = gausscalc::apply_screened_inverse(F12, kernel);
    for (int t = 0; t < 10; ++t) {
        const Eigen::VectorXd y = random_vec(d, 504, t);
        CHECK(gausscalc::eval(U12, y) ==
              doctest::Approx(gausscalc::eval(U1, y) + gausscalc::eval(U2, y)).epsilon(1e-12));
    }
}

TEST_CASE("positive data produce positive solutions that decay along rays") {
    const auto F = isotropic_sum(4, 0.8);
    const auto kernel = gausscalc::make_kernel(KernelMode::decoupled, 2.0, 1e-4, F);
    const auto U = gausscalc::apply_screened_inverse(F, kernel);
    Eigen::VectorXd dir(4);
    dir << 1, -1, 0.5, 0.25;
    dir.normalize();
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.5}) {
        const double u = gausscalc::eval(U, (t * dir).eval());
        CHECK(u > 0.0);
        CHECK(u < prev);
        prev = u;
    }
}

TEST_CASE("trace composition: materialized form equals direct evaluation") {
    const auto dims = SystemDims::for_electrons(3);
    const auto term =
        gausscalc::make_term(0.9, random_vec(dims.n, 600), random_spd(dims.n, 601));
    const auto U = gausscalc::make_sum(dims.n, {term});
    const auto mat = gausscalc::materialize_trace(U, dims);
    REQUIRE(mat.dim == dims.m);
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd x = random_vec(dims.m, 602, t);
        const double direct = gausscalc::eval_trace(U, dims, x);
        const double via_mat = gausscalc::eval(mat, x);
        CHECK(via_mat == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("laplacian matches finite differences") {
    const int d = 4;
    const auto term = gausscalc::make_term(1.2, random_vec(d, 700), random_spd(d, 701));
    const auto g = gausscalc::make_sum(d, {term});
    const double h = 1e-5;
    for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd x = random_vec(d, 702, t);
        double fd = 0.0;
        for (int i = 0; i < d; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            fd += gausscalc::eval(g, xp) - 2.0 * gausscalc::eval(g, x) + gausscalc::eval(g, xm);
        }
        fd /= h * h;
        CHECK(gausscalc::laplacian(g, x) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("laplacian of the trace matches finite differences through T") {
    const auto dims = SystemDims::for_electrons(2);
    const auto term =
        gausscalc::make_term(0.8, random_vec(dims.n, 800), random_spd(dims.n, 801));
    const auto U = gausscalc::make_sum(dims.n, {term});
    const double h = 1e-5;
    const Eigen::VectorXd x = random_vec(dims.m, 802);
    double fd = 0.0;
    for (int i = 0; i < dims.m; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        fd += gausscalc::eval_trace(U, dims, xp) - 2.0 * gausscalc::eval_trace(U, dims, x) +
              gausscalc::eval_trace(U, dims, xm);
    }
    fd /= h * h;
    CHECK(gausscalc::laplacian_trace(U, dims, x) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("degenerate-mode solve satisfies the lifted equation") {
    const auto dims = SystemDims::for_electrons(2);
    const auto F = isotropic_sum(dims.n, 0.5);
    const auto kernel = gausscalc::make_kernel(KernelMode::degenerate, 1.0, 1e-4, F, dims);
    const auto U = gausscalc::apply_screened_inverse(F, kernel, dims);
    const auto pts = gausscalc::gaussian_points(dims.m, 30, 900);
    CHECK(gausscalc::residual(F, U, 1.0, dims, pts) <= 1e-3);
}

TEST_CASE("kernel construction yields certification metadata") {
    const auto dims = SystemDims::for_electrons(2);
    const auto F = isotropic_sum(dims.n, 0.5);
    const auto k = gausscalc::make_kernel(KernelMode::degenerate, 1.0, 1e-3, F, dims);
    CHECK(k.certified_tol == 1e-3);
    CHECK(k.certified_lo == 1.0);
    CHECK(k.certified_hi > 1.0);
    CHECK(k.mu == 1.0);
    CHECK_FALSE(k.sum.terms.empty());
    // stiffer data need a wider certified band
    const auto stiff = isotropic_sum(dims.n, 2.0);
    const auto ks = gausscalc::make_kernel(KernelMode::degenerate, 1.0, 1e-3, stiff, dims);
    CHECK(ks.certified_hi > k.certified_hi);
    // degenerate mode requires system dimensions
    CHECK_THROWS_AS(gausscalc::make_kernel(KernelMode::degenerate, 1.0, 1e-3, F), input_error);
}

TEST_CASE("explicit kernel grids certify or fail loudly") {
    const auto dims = SystemDims::for_electrons(2);
    const auto F = isotropic_sum(dims.n, 0.5);
    const expsum::GridParams good{0.5, -20, 40};
    const auto k = gausscalc::make_kernel_from_grid(KernelMode::degenerate, 1.0, 1e-3, good, F,
                                                    dims);
    CHECK(k.certified_lo == 1.0);
    CHECK(int(k.sum.terms.size()) == 61);
    const expsum::GridParams bad{2.0, 0, 3};
    CHECK_THROWS_AS(
        gausscalc::make_kernel_from_grid(KernelMode::degenerate, 1.0, 1e-3, bad, F, dims),
        certification_error);
}

TEST_CASE("term budget enforcement") {
    const auto dims = SystemDims::for_electrons(2);
    const auto F = isotropic_sum(dims.n, 0.5);
    const auto kernel = gausscalc::make_kernel(KernelMode::degenerate, 1.0, 1e-3, F, dims);
    CHECK_THROWS_AS(gausscalc::apply_screened_inverse(F, kernel, dims, 3), capacity_error);
}

TEST_CASE("antisymmetrization annihilates symmetric data") {
    const auto dims = SystemDims::for_electrons(2);
    const auto group = tspace::all_permutations(2);
    // isotropic centered Gaussian is invariant under every Q
    const auto F = isotropic_sum(dims.n, 0.7);
    const auto anti = gausscalc::antisymmetrize(F, dims, group);
    for (int t = 0; t < 10; ++t)
        CHECK(std::abs(gausscalc::eval(anti, random_vec(dims.n, 1000, t))) <= 1e-14);
}

TEST_CASE("antisymmetrization is a projection with exact sign equivariance") {
    const auto dims = SystemDims::for_electrons(3);
    const auto group = tspace::all_permutations(3);
    const auto term =
        gausscalc::make_term(1.0, random_vec(dims.n, 1100), random_spd(dims.n, 1101));
    const auto F = gausscalc::make_sum(dims.n, {term});
    const auto anti = gausscalc::antisymmetrize(F, dims, group);
    const auto twice = gausscalc::antisymmetrize(anti, dims, group);

    double scale = 0.0;
    for (int t = 0; t < 20; ++t)
        scale = std::max(scale, std::abs(gausscalc::eval(anti, random_vec(dims.n, 1102, t))));
    REQUIRE(scale > 0.0);

    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd y = random_vec(dims.n, 1102, t);
        CHECK(std::abs(gausscalc::eval(twice, y) - gausscalc::eval(anti, y)) <= 1e-12 * scale);
        for (const auto& perm : group) {
            const auto act = tspace::build_actions(dims, perm);
            const double lhs = gausscalc::eval(anti, act.apply_Q(y));
            const double rhs = double(act.sign) * gausscalc::eval(anti, y);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
        }
    }
    CHECK_THROWS_AS(gausscalc::antisymmetrize(F, dims, {{1, 0, 2}}), input_error);
}

TEST_CASE("solving commutes with antisymmetrization") {
    const auto dims = SystemDims::for_electrons(2);
    const auto group = tspace::all_permutations(2);
    const auto term =
        gausscalc::make_term(1.0, random_vec(dims.n, 1200), random_spd(dims.n, 1201));
    const auto F = gausscalc::make_sum(dims.n, {term});
    const auto antiF = gausscalc::antisymmetrize(F, dims, group);

    for (const auto mode : {KernelMode::degenerate, KernelMode::decoupled}) {
        const auto kernel = gausscalc::make_kernel(mode, 1.0, 1e-4, F, dims);
        const auto solve_then_anti =
            gausscalc::antisymmetrize(gausscalc::apply_screened_inverse(F, kernel, dims), dims,
                                      group);
        const auto anti_then_solve = gausscalc::apply_screened_inverse(antiF, kernel, dims);
        double scale = 0.0;
        for (int t = 0; t < 20; ++t)
            scale = std::max(
                scale, std::abs(gausscalc::eval(anti_then_solve, random_vec(dims.n, 1202, t))));
        REQUIRE(scale > 0.0);
        for (int t = 0; t < 20; ++t) {
            const Eigen::VectorXd y = random_vec(dims.n, 1202, t);
            CHECK(std::abs(gausscalc::eval(solve_then_anti, y) -
                           gausscalc::eval(anti_then_solve, y)) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("order-zero smoothing has the exact closed form") {
    const int d = 3;
    const double a = 0.7, eps = 0.4;
    const auto F = isotropic_sum(d, a);
    const auto S = gausscalc::smooth_nu0(F, eps);
    REQUIRE(S.terms.size() == 1);
    const double shrink = 1.0 + 2.0 * a * eps * eps;
    CHECK((S.terms[0].qform - (a / shrink) * Eigen::MatrixXd::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() <= 1e-13);
    CHECK(S.terms[0].coeff == doctest::Approx(std::pow(shrink, -1.5)).epsilon(1e-12));
    CHECK(S.terms[0].center.norm() == 0.0);
    // smoothing preserves total integral: check at the transform origin by
    // comparing masses (coeff * (pi/a)^{d/2} form)
    const double mass_F = 1.0 * std::pow(M_PI / a, 1.5);
    const double mass_S = S.terms[0].coeff * std::pow(M_PI / (a / shrink), 1.5);
    CHECK(mass_S == doctest::Approx(mass_F).epsilon(1e-12));
    CHECK_THROWS_AS(gausscalc::smooth_nu0(F, 0.0), input_error);
}

TEST_CASE("compress merges identical terms and drops zeros") {
    const int d = 2;
    const auto t1 = gausscalc::make_term(0.5, random_vec(d, 1300), random_spd(d, 1301));
    auto t2 = t1;
    t2.coeff = 0.25;
    auto t3 = t1;
    t3.coeff = -0.75;
    const auto merged = gausscalc::compress(gausscalc::make_sum(d, {t1, t2}));
    REQUIRE(merged.terms.size() == 1);
    CHECK(merged.terms[0].coeff == doctest::Approx(0.75).epsilon(1e-15));
    const auto cancelled = gausscalc::compress(gausscalc::make_sum(d, {t1, t2, t3}));
    CHECK(cancelled.terms.empty());
}

TEST_CASE("deterministic sample points") {
    const auto a = gausscalc::gaussian_points(6, 25, 42);
    const auto b = gausscalc::gaussian_points(6, 25, 42);
    const auto c = gausscalc::gaussian_points(6, 25, 43);
    REQUIRE(a.size() == 25);
    CHECK(a[0].size() == 6);
    for (int i = 0; i < 25; ++i) CHECK((a[i] - b[i]).norm() == 0.0);
    CHECK((a[0] - c[0]).norm() > 0.0);
}

TEST_CASE("deviation report between the two kernel modes") {
    const auto dims = SystemDims::for_electrons(2);
    const auto F = isotropic_sum(dims.n, 1.0 / (2.0 * dims.n));
    const auto pts = gausscalc::gaussian_points(dims.n, 20, 77);
    const auto rep = gausscalc::compare_U_Utilde(F, 1.0, 1e-5, dims, pts);
    REQUIRE(rep.per_point.size() == pts.size());
    CHECK(rep.max_rel_dev > 0.0);
    CHECK(rep.max_rel_dev < 1.0);
    for (double d : rep.per_point) CHECK(d <= rep.max_rel_dev);
}
