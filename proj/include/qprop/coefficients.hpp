#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qprop/expression.hpp"

namespace qprop {

enum class FamilyTag { Free, Harmonic, DrivenHarmonic, PaulTrap, Custom };

// Family metadata attached by potentials::make_spec; lets downstream
// observables check that a formula applies to the spec at hand.
struct FamilyInfo {
    FamilyTag tag = FamilyTag::Custom;
    double omega = 1.0; // oscillator / reference frequency
    double a = 0.0;     // trap dc parameter
    double q = 0.0;     // trap drive amplitude
    double r = 0.0;     // trap frequency ratio, drive frequency = 2 r omega
};

// The physical problem: H = p^2/2m + c(t) x^2 / 2 + e(t) x.
struct CoefficientSpec {
    double mass = 1.0;
    double hbar = 1.0;
    expr::Expr c; // mass / time^2
    expr::Expr e; // force
    expr::Bindings params;
    std::optional<FamilyInfo> family;
};

// Classical coefficient functions sampled on an output grid. alpha and beta
// are the canonical solutions of y'' + (c/m) y = 0 (alpha(0)=1, alpha'(0)=0;
// beta(0)=0, beta'(0)=1), gamma is the drive response
// gamma'' + (c/m) gamma = e with vanishing initial data, and phase is the
// action integral lambda(t) = -1/(2m) * Int (gamma beta' - gamma' beta)^2 / beta^2.
// Together they carry the Heisenberg-picture position operator
// x(t) = alpha x + (beta/m) p - gamma/m.
struct EvolutionCoefficients {
    Eigen::ArrayXd t;
    Eigen::ArrayXd alpha, alpha_dot;
    Eigen::ArrayXd beta, beta_dot;
    Eigen::ArrayXd gamma, gamma_dot;
    Eigen::ArrayXd phase; // lambda(t), action units; empty unless with_phase
    double wronskian0 = 1.0;
    bool has_phase = false;
    std::vector<double> beta_zeros; // focal times: simple zeros of beta in (0, t_max]

    // Exact grid lookup (times are contract-level grid points, not samples of
    // a continuum). Throws NumericError when `time` is not a grid point.
    Eigen::Index index_of(double time) const;
    // Number of focal points strictly before `time`.
    std::size_t caustics_before(double time) const;
    // Focal time nearest to `time`; NaN when none were detected.
    double nearest_beta_zero(double time) const;
};

struct ComputeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    bool with_phase = true;
};

// Integrates the augmented first-order system for {alpha, beta, gamma, lambda}
// on `grid` (starting at 0, strictly increasing). The phase integrand
// -(gamma beta' - gamma' beta)^2 / (2 m beta^2) has a removable singularity at
// t = 0 and is taken as its limit 0 there; for e != 0 it genuinely diverges at
// focal times, so driven runs crossing a zero of beta must disable the phase.
EvolutionCoefficients compute_coefficients(const CoefficientSpec& spec,
                                           std::span<const double> grid,
                                           const ComputeOptions& opts = {});

// Retarded Green's function of y'' + (c/m) y = delta(t - t'):
// G(t, t') = [alpha(t') beta(t) - beta(t') alpha(t)] / W(t') for t > t',
// exactly 0 for t <= t'. Satisfies G(t, 0) = beta(t). Both times must be grid
// points of `coeffs`.
double greens_function(const EvolutionCoefficients& coeffs, double t, double t_prime);

// max over the grid of |alpha beta' - alpha' beta - 1|; the Wronskian of the
// canonical pair is conserved, so this measures integration quality.
double wronskian_drift(const EvolutionCoefficients& coeffs);

} // namespace qprop
