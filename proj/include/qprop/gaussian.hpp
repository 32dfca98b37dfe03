#pragma once

#include <complex>
#include <vector>

#include "qprop/coefficients.hpp"

namespace qprop {

// Closed-form evolution of the initial Gaussian
//   rho0(x1, x2) = sqrt(lambda0/pi) exp(-lambda0 (x1^2 + x2^2)/2),
// the pure state with position variance 1/(2 lambda0). The evolved density
// matrix stays a rank-one Gaussian
//   rho(x, x') = sqrt(lambda0 zeta / pi)
//                * exp(-lambda0 zeta (X^2 + X'^2)/2)
//                * exp(i [Phi2 (x^2 - x'^2) + Phi1 (x - x')]),
// with X = x + gamma/m, width factor
//   zeta(t) = 1 / (alpha^2 + (lambda0 hbar/m)^2 beta^2),
// and phase coefficients in the cancelled form
//   Phi2 = (m zeta / 2 hbar) * (alpha alpha' + (lambda0 hbar/m)^2 beta beta'),
//   Phi1 = 2 Phi2 gamma/m - gamma'/hbar,
// which are smooth through zeros of beta (no 0/0 at focal times). zeta stays
// strictly positive because alpha and beta share no zero (their Wronskian
// is 1). zeta < 1 signals squeezing of the position spread below its initial
// value when lambda0 is matched to the reference oscillator.
struct GaussianState {
    double t = 0.0;
    double lambda0 = 1.0; // initial width parameter, 1/length^2
    double mass = 1.0;
    double hbar = 1.0;
    double alpha = 1.0, alpha_dot = 0.0;
    double beta = 0.0, beta_dot = 1.0;
    double gamma = 0.0, gamma_dot = 0.0;
    double zeta = 1.0;

    double center() const { return -gamma / mass; }           // <x>
    double center_velocity() const { return -gamma_dot / mass; }
    double momentum_center() const { return -gamma_dot; }     // <p>
    double variance() const { return 1.0 / (2.0 * lambda0 * zeta); }
    double quad_phase() const;  // Phi2, 1/length^2
    double lin_phase() const;   // Phi1, 1/length
};

// One state per grid time of `coeffs`. lambda0 must be positive.
std::vector<GaussianState> evolve_gaussian(const EvolutionCoefficients& coeffs,
                                           const CoefficientSpec& spec, double lambda0);

// Single-time convenience; `t` must be a grid point of `coeffs`.
GaussianState gaussian_state_at(const EvolutionCoefficients& coeffs,
                                const CoefficientSpec& spec, double lambda0, double t);

// rho(x, x'; t). Hermitian: rho(x, x') = conj(rho(x', x)); the diagonal is the
// position density.
std::complex<double> density_matrix_element(const GaussianState& state, double x,
                                            double x_prime);

// P(x, t) = sqrt(lambda0 zeta / pi) exp(-lambda0 zeta (x + gamma/m)^2);
// normalized, mean -gamma/m, variance zeta-scaled.
double position_density(const GaussianState& state, double x);

// Weyl symbol W(x, p) = Int dy <x - y/2| rho |x + y/2> exp(i y p / hbar).
// Normalized as Int dx dp / (2 pi hbar) W = 1; the x-marginal is the position
// density and the p-marginal is a Gaussian centered on -gamma'.
double wigner(const GaussianState& state, double x, double p);

// The evolved pure state phi with rho(x, x') = phi(x) conj(phi(x')). The
// unobservable global phase is fixed to zero.
struct PureStateWavefunction {
    double norm_amp = 0.0;    // (lambda0 zeta / pi)^(1/4)
    double width = 1.0;       // lambda0 zeta
    double center = 0.0;      // -gamma/m
    double quad_phase = 0.0;  // Phi2
    double lin_phase = 0.0;   // Phi1

    std::complex<double> operator()(double x) const;
};

PureStateWavefunction pure_state_wavefunction(const GaussianState& state);

// Tr rho^2 in closed Gaussian form; identically 1 for this family (unitary
// evolution of a pure state).
double purity(const GaussianState& state);

// Smallest width factor over a set of evolved states (squeezing witness).
double min_zeta(const std::vector<GaussianState>& states);

} // namespace qprop
