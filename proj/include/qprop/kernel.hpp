#pragma once

#include <complex>
#include <functional>

#include "qprop/coefficients.hpp"

namespace qprop {

// Complex-Gaussian parameterization of the coordinate-space propagator
// K(x, t; x', 0) at a fixed time:
//   K = modulus * exp(i * [prefactor_phase + scalar_phase
//                          + coeff_xx x^2 + coeff_xpxp x'^2 + coeff_xxp x x'
//                          + coeff_x x + coeff_xp x']).
// All phase coefficients are in radians per the appropriate power of length.
struct KernelForm {
    double t = 0.0;
    double modulus = 0.0;         // sqrt(m / (2 pi hbar |beta|))
    double prefactor_phase = 0.0; // branch of 1/sqrt(i beta), Maslov-corrected
    double scalar_phase = 0.0;    // lambda(t) / hbar
    double coeff_xx = 0.0;        // m beta'/(2 hbar beta)
    double coeff_xpxp = 0.0;      // m alpha/(2 hbar beta)
    double coeff_xxp = 0.0;       // -m/(hbar beta), exact
    double coeff_x = 0.0;         // (gamma beta' - gamma' beta)/(hbar beta)
    double coeff_xp = 0.0;        // -gamma/(hbar beta)
};

inline constexpr double kDefaultCausticEps = 1e-9;

// Assembles the kernel at a grid time of `coeffs`. The 1/sqrt(i) branch is
// fixed by the short-time limit (phase -pi/4 as t -> 0+) and continued through
// each simple zero of beta by the standard Maslov rule, accumulating -pi/2 per
// zero. Throws CausticError when |beta(t)| <= eps, reporting the nearest zero.
KernelForm kernel_at(const EvolutionCoefficients& coeffs, const CoefficientSpec& spec, double t,
                     double caustic_eps = kDefaultCausticEps);

// K(x, t; x', 0). |K|^2 = m/(2 pi hbar |beta|), independent of x and x'.
std::complex<double> evaluate_kernel(const KernelForm& form, double x, double x_prime);

struct ShortTimeOptions {
    double x = 0.0;        // evaluation point
    double lo = -12.0;     // integration window for the test function
    double hi = 12.0;
    double quad_abs_tol = 1e-9;
    int max_intervals = 400000;
};

// Delta-family check: returns |Int dx' K(x, t; x', 0) f(x') - f(x)|, which
// vanishes linearly as t -> 0 for smooth f. The integral is evaluated by
// adaptive quadrature that subdivides until the quadratic kernel phase is
// resolved; throws QuadratureError if it cannot converge.
double short_time_check(const CoefficientSpec& spec,
                        const std::function<double(double)>& test_fn, double t,
                        const ShortTimeOptions& opts = {});

} // namespace qprop
