#include "qprop/kernel.hpp"

#include <cmath>
#include <numbers>

#include "qprop/errors.hpp"
#include "qprop/quadrature.hpp"

namespace qprop {

using std::numbers::pi;

KernelForm kernel_at(const EvolutionCoefficients& coeffs, const CoefficientSpec& spec, double t,
                     double caustic_eps) {
    if (!coeffs.has_phase)
        throw NumericError("kernel assembly needs the phase lambda(t); recompute coefficients "
                           "with with_phase enabled");
    const Eigen::Index i = coeffs.index_of(t);
    const double beta = coeffs.beta[i];
    if (std::abs(beta) <= caustic_eps) throw CausticError(t, coeffs.nearest_beta_zero(t));

    const double m = spec.mass;
    const double hbar = spec.hbar;
    const double alpha = coeffs.alpha[i];
    const double beta_dot = coeffs.beta_dot[i];
    const double gamma = coeffs.gamma[i];
    const double gamma_dot = coeffs.gamma_dot[i];

    KernelForm form;
    form.t = t;
    form.modulus = std::sqrt(m / (2.0 * pi * hbar * std::abs(beta)));
    form.prefactor_phase =
        -0.25 * pi - 0.5 * pi * static_cast<double>(coeffs.caustics_before(t));
    form.scalar_phase = coeffs.phase[i] / hbar;
    form.coeff_xx = m * beta_dot / (2.0 * hbar * beta);
    form.coeff_xpxp = m * alpha / (2.0 * hbar * beta);
    form.coeff_xxp = -m / (hbar * beta);
    form.coeff_x = (gamma * beta_dot - gamma_dot * beta) / (hbar * beta);
    form.coeff_xp = -gamma / (hbar * beta);
    return form;
}

std::complex<double> evaluate_kernel(const KernelForm& form, double x, double x_prime) {
    const double phase = form.prefactor_phase + form.scalar_phase +
                         (form.coeff_xx * x + form.coeff_xxp * x_prime + form.coeff_x) * x +
                         (form.coeff_xpxp * x_prime + form.coeff_xp) * x_prime;
    return std::polar(form.modulus, phase);
}

double short_time_check(const CoefficientSpec& spec,
                        const std::function<double(double)>& test_fn, double t,
                        const ShortTimeOptions& opts) {
    if (!(t > 0.0)) throw NumericError("short-time check needs t > 0");
    const double grid[3] = {0.0, 0.5 * t, t};
    ComputeOptions copts;
    const EvolutionCoefficients coeffs = compute_coefficients(spec, grid, copts);
    const KernelForm form = kernel_at(coeffs, spec, t);

    quad::QuadOptions qopt;
    qopt.abs_tol = opts.quad_abs_tol;
    qopt.rel_tol = 1e-12;
    qopt.max_intervals = opts.max_intervals;
    const std::complex<double> integral = quad::integrate<std::complex<double>>(
        [&](double xp) { return evaluate_kernel(form, opts.x, xp) * test_fn(xp); }, opts.lo,
        opts.hi, qopt);

    return std::abs(integral - test_fn(opts.x));
}

} // namespace qprop
