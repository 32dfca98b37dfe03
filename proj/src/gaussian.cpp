#include "qprop/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qprop/errors.hpp"

namespace qprop {

using std::numbers::pi;

double GaussianState::quad_phase() const {
    const double k = lambda0 * hbar / mass;
    return 0.5 * mass * zeta / hbar * (alpha * alpha_dot + k * k * beta * beta_dot);
}

double GaussianState::lin_phase() const {
    return 2.0 * quad_phase() * gamma / mass - gamma_dot / hbar;
}

std::vector<GaussianState> evolve_gaussian(const EvolutionCoefficients& coeffs,
                                           const CoefficientSpec& spec, double lambda0) {
    if (!(lambda0 > 0.0)) throw ConfigError("initial width parameter lambda0 must be positive");
    const double k = lambda0 * spec.hbar / spec.mass;
    std::vector<GaussianState> states(static_cast<std::size_t>(coeffs.t.size()));
    for (Eigen::Index i = 0; i < coeffs.t.size(); ++i) {
        GaussianState& s = states[static_cast<std::size_t>(i)];
        s.t = coeffs.t[i];
        s.lambda0 = lambda0;
        s.mass = spec.mass;
        s.hbar = spec.hbar;
        s.alpha = coeffs.alpha[i];
        s.alpha_dot = coeffs.alpha_dot[i];
        s.beta = coeffs.beta[i];
        s.beta_dot = coeffs.beta_dot[i];
        s.gamma = coeffs.gamma[i];
        s.gamma_dot = coeffs.gamma_dot[i];
        const double kb = k * s.beta;
        s.zeta = 1.0 / (s.alpha * s.alpha + kb * kb);
    }
    return states;
}

GaussianState gaussian_state_at(const EvolutionCoefficients& coeffs,
                                const CoefficientSpec& spec, double lambda0, double t) {
    if (!(lambda0 > 0.0)) throw ConfigError("initial width parameter lambda0 must be positive");
    const Eigen::Index i = coeffs.index_of(t);
    GaussianState s;
    s.t = coeffs.t[i];
    s.lambda0 = lambda0;
    s.mass = spec.mass;
    s.hbar = spec.hbar;
    s.alpha = coeffs.alpha[i];
    s.alpha_dot = coeffs.alpha_dot[i];
    s.beta = coeffs.beta[i];
    s.beta_dot = coeffs.beta_dot[i];
    s.gamma = coeffs.gamma[i];
    s.gamma_dot = coeffs.gamma_dot[i];
    const double kb = lambda0 * spec.hbar / spec.mass * s.beta;
    s.zeta = 1.0 / (s.alpha * s.alpha + kb * kb);
    return s;
}

std::complex<double> density_matrix_element(const GaussianState& state, double x,
                                            double x_prime) {
    const double lz = state.lambda0 * state.zeta;
    const double X = x + state.gamma / state.mass;
    const double Xp = x_prime + state.gamma / state.mass;
    const double amp = std::sqrt(lz / pi) * std::exp(-0.5 * lz * (X * X + Xp * Xp));
    const double phase = state.quad_phase() * (x * x - x_prime * x_prime) +
                         state.lin_phase() * (x - x_prime);
    return std::polar(amp, phase);
}

double position_density(const GaussianState& state, double x) {
    const double lz = state.lambda0 * state.zeta;
    const double X = x + state.gamma / state.mass;
    return std::sqrt(lz / pi) * std::exp(-lz * X * X);
}

double wigner(const GaussianState& state, double x, double p) {
    const double lz = state.lambda0 * state.zeta;
    const double X = x + state.gamma / state.mass;
    const double p_line = state.hbar * (2.0 * state.quad_phase() * x + state.lin_phase());
    const double dp = p - p_line;
    return 2.0 * std::exp(-lz * X * X) * std::exp(-dp * dp / (lz * state.hbar * state.hbar));
}

std::complex<double> PureStateWavefunction::operator()(double x) const {
    const double X = x - center;
    const double amp = norm_amp * std::exp(-0.5 * width * X * X);
    return std::polar(amp, (quad_phase * x + lin_phase) * x);
}

PureStateWavefunction pure_state_wavefunction(const GaussianState& state) {
    PureStateWavefunction phi;
    phi.width = state.lambda0 * state.zeta;
    phi.norm_amp = std::pow(phi.width / pi, 0.25);
    phi.center = state.center();
    phi.quad_phase = state.quad_phase();
    phi.lin_phase = state.lin_phase();
    return phi;
}

double purity(const GaussianState& state) {
    // Tr rho^2 = Int |rho(x, x')|^2 dx dx'; the phases drop out and the two
    // Gaussian integrals cancel the squared normalization.
    const double lz = state.lambda0 * state.zeta;
    const double norm_sq = lz / pi;
    return norm_sq * (pi / lz);
}

double min_zeta(const std::vector<GaussianState>& states) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : states) m = std::min(m, s.zeta);
    return m;
}

} // namespace qprop
