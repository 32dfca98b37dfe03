#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qprop/errors.hpp"
#include "qprop/gaussian.hpp"
#include "qprop/kernel.hpp"
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

CoefficientSpec family_spec(FamilyTag tag, double omega = 1.0) {
    PotentialFamily fam;
    fam.tag = tag;
    fam.omega = omega;
    return make_spec(fam);
}

} // namespace

TEST_CASE("free particle kernel matches the closed form") {
    const auto spec = family_spec(FamilyTag::Free);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pick_t(0.2, 4.0);
    std::uniform_real_distribution<double> pick_x(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double t = pick_t(rng);
        const auto grid = linspace(0.0, t, 5);
        const auto coeffs = compute_coefficients(spec, grid);
        const KernelForm form = kernel_at(coeffs, spec, t);
        for (int k = 0; k < 10; ++k) {
            const double x = pick_x(rng);
            const double xp = pick_x(rng);
            const std::complex<double> got = evaluate_kernel(form, x, xp);
            const std::complex<double> expect =
                std::sqrt(std::complex<double>(0.0, -1.0) / (2.0 * pi * t)) *
                std::exp(std::complex<double>(0.0, (x - xp) * (x - xp) / (2.0 * t)));
            CHECK(std::abs(got - expect) < 1e-9);
        }
    }
}

TEST_CASE("harmonic prefactor at the quarter period") {
    const auto spec = family_spec(FamilyTag::Harmonic);
    const auto grid = linspace(0.0, pi / 2.0, 51);
    const auto coeffs = compute_coefficients(spec, grid);
    const KernelForm form = kernel_at(coeffs, spec, pi / 2.0);
    const std::complex<double> k0 = evaluate_kernel(form, 0.0, 0.0);
    CHECK(std::abs(k0) == doctest::Approx(std::sqrt(1.0 / (2.0 * pi))).epsilon(1e-8));
    // At the origin only the prefactor and the scalar phase survive; the
    // undriven oscillator has no scalar phase.
    CHECK(std::arg(k0) == doctest::Approx(-pi / 4.0).epsilon(1e-10));
}

TEST_CASE("kernel refuses to evaluate at a focal time") {
    const auto spec = family_spec(FamilyTag::Harmonic);
    const auto grid = linspace(0.0, pi, 64);
    const auto coeffs = compute_coefficients(spec, grid);
    try {
        kernel_at(coeffs, spec, pi);
        FAIL("expected CausticError");
    } catch (const CausticError& e) {
        CHECK(e.t == doctest::Approx(pi));
        CHECK(e.beta_zero == doctest::Approx(pi).epsilon(1e-6));
    }
}

TEST_CASE("kernel modulus is coordinate independent") {
    PotentialFamily fam;
    fam.tag = FamilyTag::DrivenHarmonic;
    fam.omega = 1.0;
    fam.drive = expr::parse_expression("0.3*cos(0.7*t)");
    const auto dspec = make_spec(fam);
    const auto grid = linspace(0.0, 1.3, 14);
    const auto coeffs = compute_coefficients(dspec, grid);
    const KernelForm form = kernel_at(coeffs, dspec, 1.3);
    const double expected = std::sqrt(1.0 / (2.0 * pi * std::abs(coeffs.beta[13])));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pick(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double x = pick(rng);
        const double xp = pick(rng);
        CHECK(std::abs(evaluate_kernel(form, x, xp)) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("driven oscillator kernel matches the source-integral oracle") {
    PotentialFamily fam;
    fam.tag = FamilyTag::DrivenHarmonic;
    fam.omega = 1.0;
    fam.drive = expr::parse_expression("0.3*cos(0.7*t)");
    const auto spec = make_spec(fam);
    auto drive = [](double t) { return 0.3 * std::cos(0.7 * t); };

    const double samples[3][3] = {{0.5, 0.2, -0.1}, {1.3, 1.0, 0.5}, {2.9, -0.4, 0.8}};
    for (const auto& s : samples) {
        const double t = s[0], x = s[1], xp = s[2];
        const auto grid = linspace(0.0, t, 33);
        const auto coeffs = compute_coefficients(spec, grid);
        const std::complex<double> got = evaluate_kernel(kernel_at(coeffs, spec, t), x, xp);
        const std::complex<double> expect =
            oracle::driven_kernel_oracle(1.0, 1.0, 1.0, drive, t, x, xp);
        CHECK(std::abs(got - expect) <= 1e-6 * std::abs(expect));
    }
}

TEST_CASE("kernel at the origin reduces to prefactor times scalar phase") {
    PotentialFamily fam;
    fam.tag = FamilyTag::DrivenHarmonic;
    fam.omega = 1.0;
    fam.drive = expr::parse_expression("0.5*cos(t)");
    const auto spec = make_spec(fam);
    const auto grid = linspace(0.0, 2.0, 21);
    const auto coeffs = compute_coefficients(spec, grid);
    const KernelForm form = kernel_at(coeffs, spec, 2.0);
    const std::complex<double> k0 = evaluate_kernel(form, 0.0, 0.0);
    const std::complex<double> expect =
        std::polar(form.modulus, form.prefactor_phase + form.scalar_phase);
    CHECK(std::abs(k0 - expect) == 0.0);
}

TEST_CASE("prefactor phase is continuous between and drops by pi/2 across caustics") {
    const auto spec = family_spec(FamilyTag::Harmonic);
    const auto grid = linspace(0.0, 3.0 * pi, 3001);
    const auto coeffs = compute_coefficients(spec, grid);

    double prev_phase = 0.0;
    bool have_prev = false;
    int jumps = 0;
    for (Eigen::Index i = 1; i < coeffs.t.size(); ++i) {
        const double t = coeffs.t[i];
        if (std::abs(coeffs.beta[i]) < 1e-2) continue; // excluded focal neighborhoods
        const KernelForm form = kernel_at(coeffs, spec, t);
        const double phase = std::arg(evaluate_kernel(form, 0.0, 0.0));
        if (have_prev) {
            double delta = phase - prev_phase;
            while (delta > pi) delta -= 2.0 * pi;
            while (delta < -pi) delta += 2.0 * pi;
            if (std::abs(delta) > 1e-6) {
                // Only the Maslov jump of -pi/2 at a crossing is allowed.
                CHECK(delta == doctest::Approx(-pi / 2.0).epsilon(1e-6));
                ++jumps;
            }
        }
        prev_phase = phase;
        have_prev = true;
    }
    CHECK(jumps == 2); // two zeros strictly inside (0, 3 pi)
}

TEST_CASE("gaussian composition through the transfer matrix") {
    // Evolving to t1 and then, with the time-shifted coefficients, to t2 must
    // equal direct evolution to t1 + t2 at the level of the state parameters.
    const double t1 = 0.8, t2 = 1.1;
    PotentialFamily fam;
    fam.tag = FamilyTag::DrivenHarmonic;
    fam.omega = 1.0;
    fam.drive = expr::parse_expression("0.3*cos(0.7*t)");
    const auto spec = make_spec(fam);

    PotentialFamily shifted = fam;
    shifted.drive = expr::parse_expression("0.3*cos(0.7*(t+t1))");
    shifted.params["t1"] = t1;
    const auto spec_shifted = make_spec(shifted);

    const auto c1 = compute_coefficients(spec, linspace(0.0, t1, 41));
    const auto c2 = compute_coefficients(spec_shifted, linspace(0.0, t2, 41));
    const auto c12 = compute_coefficients(spec, linspace(0.0, t1 + t2, 81));

    const Eigen::Index i1 = c1.t.size() - 1;
    const Eigen::Index i2 = c2.t.size() - 1;
    const Eigen::Index i12 = c12.t.size() - 1;

    // Transfer matrices (m = 1) and drive-induced shifts.
    Eigen::Matrix2d m1, m2;
    m1 << c1.alpha[i1], c1.beta[i1], c1.alpha_dot[i1], c1.beta_dot[i1];
    m2 << c2.alpha[i2], c2.beta[i2], c2.alpha_dot[i2], c2.beta_dot[i2];
    Eigen::Vector2d v1(-c1.gamma[i1], -c1.gamma_dot[i1]);
    Eigen::Vector2d v2(-c2.gamma[i2], -c2.gamma_dot[i2]);

    const Eigen::Matrix2d m_tot = m2 * m1;
    const Eigen::Vector2d v_tot = m2 * v1 + v2;

    CHECK(m_tot(0, 0) == doctest::Approx(c12.alpha[i12]).epsilon(1e-7));
    CHECK(m_tot(0, 1) == doctest::Approx(c12.beta[i12]).epsilon(1e-7));
    CHECK(m_tot(1, 0) == doctest::Approx(c12.alpha_dot[i12]).epsilon(1e-7));
    CHECK(m_tot(1, 1) == doctest::Approx(c12.beta_dot[i12]).epsilon(1e-7));
    CHECK(v_tot(0) == doctest::Approx(-c12.gamma[i12]).epsilon(1e-7));
    CHECK(v_tot(1) == doctest::Approx(-c12.gamma_dot[i12]).epsilon(1e-7));

    // The composed parameters reproduce the directly evolved Gaussian state.
    const auto state_direct = gaussian_state_at(c12, spec, 1.0, t1 + t2);
    const double zeta_comp = 1.0 / (m_tot(0, 0) * m_tot(0, 0) + m_tot(0, 1) * m_tot(0, 1));
    CHECK(zeta_comp == doctest::Approx(state_direct.zeta).epsilon(1e-7));
    CHECK(-v_tot(0) == doctest::Approx(state_direct.gamma).epsilon(1e-7));
}

TEST_CASE("short-time limit recovers the test function") {
    auto gaussian_fn = [](double x) { return std::exp(-0.5 * x * x); };

    SUBCASE("free particle") {
        const auto spec = family_spec(FamilyTag::Free);
        const double dev = short_time_check(spec, gaussian_fn, 1e-3);
        CHECK(dev < 1e-3);
    }
    SUBCASE("deviation is first order in t") {
        const auto spec = family_spec(FamilyTag::Free);
        const double dev1 = short_time_check(spec, gaussian_fn, 1e-4);
        const double dev2 = short_time_check(spec, gaussian_fn, 2e-4);
        CHECK(dev1 / dev2 > 0.45);
        CHECK(dev1 / dev2 < 0.55);
    }
    SUBCASE("harmonic oscillator obeys the same contract") {
        const auto spec = family_spec(FamilyTag::Harmonic);
        const double dev = short_time_check(spec, gaussian_fn, 1e-3);
        CHECK(dev < 1e-3);
        const double dev1 = short_time_check(spec, gaussian_fn, 1e-4);
        const double dev2 = short_time_check(spec, gaussian_fn, 2e-4);
        CHECK(dev1 / dev2 > 0.45);
        CHECK(dev1 / dev2 < 0.55);
    }
}
