#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qprop/coefficients.hpp"
#include "qprop/errors.hpp"
#include "qprop/potentials.hpp"

#include "oracles.hpp"

using namespace qprop;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return g;
}

CoefficientSpec harmonic_spec(double omega = 1.0) {
    PotentialFamily fam;
    fam.tag = FamilyTag::Harmonic;
    fam.omega = omega;
    return make_spec(fam);
}

CoefficientSpec driven_spec(const char* drive, expr::Bindings params = {}) {
    PotentialFamily fam;
    fam.tag = FamilyTag::DrivenHarmonic;
    fam.omega = 1.0;
    fam.drive = expr::parse_expression(drive);
    fam.params = std::move(params);
    return make_spec(fam);
}

} // namespace

TEST_CASE("harmonic coefficients are cosine and sine") {
    const auto spec = harmonic_spec();
    const auto grid = linspace(0.0, 2.0 * pi, 201);
    const auto coeffs = compute_coefficients(spec, grid);
    for (Eigen::Index i = 0; i < coeffs.t.size(); ++i) {
        CHECK(std::abs(coeffs.alpha[i] - std::cos(coeffs.t[i])) < 1e-8);
        CHECK(std::abs(coeffs.beta[i] - std::sin(coeffs.t[i])) < 1e-8);
    }
    const Eigen::Index quarter = coeffs.index_of(grid[50]); // t = pi/2
    CHECK(std::abs(coeffs.alpha[quarter]) < 1e-8);
    CHECK(coeffs.beta[quarter] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("initial data is exact for any spec") {
    const auto spec = driven_spec("0.3*cos(0.7*t)");
    const auto grid = linspace(0.0, 1.0, 11);
    const auto coeffs = compute_coefficients(spec, grid);
    CHECK(coeffs.alpha[0] == 1.0);
    CHECK(coeffs.alpha_dot[0] == 0.0);
    CHECK(coeffs.beta[0] == 0.0);
    CHECK(coeffs.beta_dot[0] == 1.0);
    CHECK(coeffs.gamma[0] == 0.0);
    CHECK(coeffs.gamma_dot[0] == 0.0);
    CHECK(coeffs.phase[0] == 0.0);
    CHECK(coeffs.wronskian0 == 1.0);
}

TEST_CASE("constant drive response gamma = e0 (1 - cos t)") {
    const double e0 = 0.3;
    const auto spec = driven_spec("e0", {{"e0", e0}});
    const auto grid = linspace(0.0, pi, 101);
    ComputeOptions opts;
    opts.with_phase = false; // driven phase diverges at the focal time t = pi
    const auto coeffs = compute_coefficients(spec, grid, opts);
    const Eigen::Index end = coeffs.t.size() - 1;
    CHECK(coeffs.gamma[end] == doctest::Approx(2.0 * e0).epsilon(1e-8));
    for (Eigen::Index i = 0; i < coeffs.t.size(); ++i)
        CHECK(std::abs(coeffs.gamma[i] - e0 * (1.0 - std::cos(coeffs.t[i]))) < 1e-8);
}

TEST_CASE("phase is non-increasing under a drive") {
    const auto spec = driven_spec("0.3*cos(0.7*t)");
    const auto grid = linspace(0.0, 3.0, 61);
    const auto coeffs = compute_coefficients(spec, grid);
    for (Eigen::Index i = 1; i < coeffs.t.size(); ++i)
        CHECK(coeffs.phase[i] <= coeffs.phase[i - 1] + 1e-12);
    CHECK(coeffs.phase[coeffs.t.size() - 1] < 0.0);
}

TEST_CASE("wronskian drift stays small") {
    SUBCASE("harmonic over a long span") {
        const auto coeffs =
            compute_coefficients(harmonic_spec(), linspace(0.0, 100.0, 1001));
        CHECK(wronskian_drift(coeffs) < 1e-8);
    }
    SUBCASE("single point is exact") {
        const double g[1] = {0.0};
        const auto coeffs = compute_coefficients(harmonic_spec(), g);
        CHECK(wronskian_drift(coeffs) == 0.0);
    }
    SUBCASE("paul trap over 50 dimensionless periods") {
        PotentialFamily fam;
        fam.tag = FamilyTag::PaulTrap;
        fam.omega = 1.0;
        fam.a = 1.0;
        fam.q = 0.25;
        fam.r = 10.0;
        const auto coeffs =
            compute_coefficients(make_spec(fam), linspace(0.0, 50.0, 2001));
        CHECK(wronskian_drift(coeffs) < 1e-7);
    }
}

TEST_CASE("retarded green's function") {
    const auto spec = harmonic_spec();
    const auto grid = linspace(0.0, pi, 101);
    const auto coeffs = compute_coefficients(spec, grid);

    SUBCASE("vanishes for t <= t'") {
        CHECK(greens_function(coeffs, grid[10], grid[20]) == 0.0);
        CHECK(greens_function(coeffs, grid[20], grid[20]) == 0.0);
    }
    SUBCASE("harmonic response is sin(t - t')") {
        CHECK(greens_function(coeffs, pi, pi / 2.0) == doctest::Approx(1.0).epsilon(1e-8));
        for (int i : {30, 55, 80})
            for (int j : {5, 20}) {
                if (grid[static_cast<std::size_t>(j)] >= grid[static_cast<std::size_t>(i)])
                    continue;
                const double expect = std::sin(grid[static_cast<std::size_t>(i)] -
                                               grid[static_cast<std::size_t>(j)]);
                CHECK(greens_function(coeffs, grid[static_cast<std::size_t>(i)],
                                      grid[static_cast<std::size_t>(j)]) ==
                      doctest::Approx(expect).epsilon(1e-8));
            }
    }
    SUBCASE("G(t, 0) equals beta(t)") {
        for (Eigen::Index i = 1; i < coeffs.t.size(); ++i)
            CHECK(greens_function(coeffs, coeffs.t[i], 0.0) ==
                  doctest::Approx(coeffs.beta[i]).epsilon(1e-12));
    }
    SUBCASE("out-of-span times are rejected") {
        CHECK_THROWS_AS(greens_function(coeffs, 2.0 * pi, 0.0), NumericError);
        CHECK_THROWS_AS(greens_function(coeffs, grid[50], 0.017), NumericError);
    }
}

TEST_CASE("ode route for gamma matches quadrature of the green's function") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> pick_w(0.5, 2.0);
    std::uniform_real_distribution<double> pick_e(0.1, 1.0);
    std::uniform_real_distribution<double> pick_W(0.3, 1.5);
    std::uniform_real_distribution<double> pick_t(0.5, 6.0);

    for (int trial = 0; trial < 20; ++trial) {
        const double w = pick_w(rng);
        const double e0 = pick_e(rng);
        const double W = pick_W(rng);
        const double t_target = pick_t(rng);

        PotentialFamily fam;
        fam.tag = FamilyTag::DrivenHarmonic;
        fam.omega = w;
        fam.drive = expr::parse_expression("e0*cos(W*t)");
        fam.params = {{"e0", e0}, {"W", W}};
        const auto spec = make_spec(fam);

        auto grid = linspace(0.0, t_target, 801);
        const auto coeffs = compute_coefficients(spec, grid);

        // Direct quadrature of the response integral, with the coefficient
        // pair interpolated between grid points.
        auto drive = [&](double tp) { return e0 * std::cos(W * tp); };
        const double beta_t = coeffs.beta[coeffs.t.size() - 1];
        const double alpha_t = coeffs.alpha[coeffs.t.size() - 1];
        const double gamma_quad = oracle::adaptive_simpson(
            [&](double tp) {
                const double g =
                    oracle::interp_alpha(coeffs, tp) * beta_t -
                    oracle::interp_beta(coeffs, tp) * alpha_t;
                return g * drive(tp);
            },
            0.0, t_target, 1e-12);

        const double gamma_ode = coeffs.gamma[coeffs.t.size() - 1];
        CHECK(std::abs(gamma_ode - gamma_quad) <=
              1e-7 * std::max(1.0, std::abs(gamma_ode)));
    }
}

TEST_CASE("beta zeros are located for caustic bookkeeping") {
    const auto coeffs =
        compute_coefficients(harmonic_spec(), linspace(0.0, 10.0, 101));
    REQUIRE(coeffs.beta_zeros.size() == 3);
    CHECK(coeffs.beta_zeros[0] == doctest::Approx(pi).epsilon(1e-9));
    CHECK(coeffs.beta_zeros[1] == doctest::Approx(2.0 * pi).epsilon(1e-9));
    CHECK(coeffs.beta_zeros[2] == doctest::Approx(3.0 * pi).epsilon(1e-9));
    CHECK(coeffs.caustics_before(1.0) == 0);
    CHECK(coeffs.caustics_before(4.0) == 1);
    CHECK(coeffs.caustics_before(7.0) == 2);
}

TEST_CASE("grid must start at zero") {
    const auto spec = harmonic_spec();
    const double bad[2] = {1.0, 2.0};
    CHECK_THROWS_AS(compute_coefficients(spec, bad), NumericError);
}

TEST_CASE("expression domain errors surface with the offending time") {
    CoefficientSpec spec;
    spec.c = expr::parse_expression("1/(t-1)"); // singular inside the span
    spec.e = expr::parse_expression("0");
    const double grid[2] = {0.0, 2.0};
    CHECK_THROWS_AS(compute_coefficients(spec, grid), NumericError);
}
