#include "qprop/observables.hpp"

#include <cmath>
#include <numbers>

#include "qprop/errors.hpp"

namespace qprop {

namespace {

const FamilyInfo& require_driven_family(const CoefficientSpec& spec, double lambda0) {
    if (!spec.family ||
        (spec.family->tag != FamilyTag::Harmonic && spec.family->tag != FamilyTag::DrivenHarmonic))
        throw ConfigError("operation requires the (driven-)harmonic family");
    const double matched = spec.mass * spec.family->omega / spec.hbar;
    if (std::abs(lambda0 - matched) > 1e-12 * matched)
        throw ConfigError("operation requires the matched initial width lambda0 = m omega/hbar");
    return *spec.family;
}

const FamilyInfo& require_trap_family(const CoefficientSpec& spec) {
    if (!spec.family || spec.family->tag != FamilyTag::PaulTrap)
        throw ConfigError("operation requires the paul-trap family");
    return *spec.family;
}

double drive_at(const CoefficientSpec& spec, double t) {
    return expr::eval_expression(spec.e, t, spec.params);
}

double drive_dot_at(const CoefficientSpec& spec, double t) {
    return expr::eval_expression(expr::differentiate(spec.e), t, spec.params);
}

} // namespace

double driven_energy(const GaussianState& state, const CoefficientSpec& spec) {
    const FamilyInfo& fam = require_driven_family(spec, state.lambda0);
    const double w = fam.omega;
    const double a = state.center();
    const double a_dot = state.center_velocity();
    return 0.5 * spec.hbar * w + 0.5 * spec.mass * w * w * a * a +
           0.5 * spec.mass * a_dot * a_dot + a * drive_at(spec, state.t);
}

double com_energy(const GaussianState& state, const CoefficientSpec& spec) {
    const FamilyInfo& fam = require_driven_family(spec, state.lambda0);
    const double w = fam.omega;
    const double a = state.center();
    const double a_dot = state.center_velocity();
    return 0.5 * spec.mass * w * w * a * a + 0.5 * spec.mass * a_dot * a_dot;
}

double poisson_excitation(double com_energy, double hbar_omega, int n) {
    if (n < 0) throw ConfigError("level index must be non-negative");
    if (!(com_energy >= 0.0)) throw ConfigError("center-of-mass energy must be non-negative");
    const double mean = com_energy / hbar_omega;
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

ThermoRates thermo_rates(const GaussianState& state, const CoefficientSpec& spec) {
    const FamilyInfo& fam = require_driven_family(spec, state.lambda0);
    const double m = spec.mass;
    const double w2 = fam.omega * fam.omega;
    const double t = state.t;
    const double a = state.center();
    const double a_dot = state.center_velocity();
    const double e = drive_at(spec, t);
    const double e_dot = drive_dot_at(spec, t);
    const double a_ddot = -w2 * a - e / m; // classical equation of motion

    ThermoRates r;
    r.t = t;
    r.trace_drho_h = m * w2 * a * a_dot + m * a_dot * a_ddot + a_dot * e;
    r.trace_rho_dh = a * e_dot;
    r.du_dt = r.trace_drho_h + r.trace_rho_dh;
    r.chi = a_dot * e + a * e_dot;
    r.work_rate_source = -e * a_dot;
    r.work_rate_trace = -a * e_dot;
    r.heat_rate_balanced = m * w2 * a * a_dot + m * a_dot * a_ddot + 2.0 * a_dot * e + a * e_dot;
    r.heat_rate_trace = r.trace_drho_h;
    return r;
}

TrapStateParams trap_state_params(const EvolutionCoefficients& coeffs,
                                  const CoefficientSpec& spec, double u) {
    const FamilyInfo& fam = require_trap_family(spec);
    const double w = fam.omega;
    const Eigen::Index i = coeffs.index_of(u / w);

    const double A = coeffs.alpha[i];
    const double B = w * coeffs.beta[i];
    const double Ap = coeffs.alpha_dot[i] / w; // d alpha / du
    const double Bp = coeffs.beta_dot[i];      // d (omega beta) / du

    TrapStateParams p;
    p.u = u;
    p.zeta = 1.0 / (A * A + B * B);
    p.nu = 0.5 * (1.0 + p.zeta);
    p.sigma = 0.5 * p.zeta * (A * Ap + B * Bp);
    return p;
}

double trap_energy(const EvolutionCoefficients& coeffs, const CoefficientSpec& spec, double u) {
    const FamilyInfo& fam = require_trap_family(spec);
    const double w = fam.omega;
    const Eigen::Index i = coeffs.index_of(u / w);

    const double A = coeffs.alpha[i];
    const double B = w * coeffs.beta[i];
    const double Ap = coeffs.alpha_dot[i] / w;
    const double Bp = coeffs.beta_dot[i];
    const double zeta = 1.0 / (A * A + B * B);
    const double mix = A * Ap + B * Bp;
    const double c_tilde = fam.a - 2.0 * fam.q * std::cos(2.0 * fam.r * u);

    return 0.5 * spec.hbar * w *
           (0.5 * c_tilde / zeta + 0.5 * zeta + 0.5 * zeta * mix * mix);
}

namespace {

double log_even_weight(int n) {
    // log of (2n)! / (4^n (n!)^2) = Gamma(n + 1/2)^2 4^n / ((2n)! pi),
    // evaluated as lgamma to stay finite far past n ~ 80.
    return 2.0 * std::lgamma(n + 0.5) + 2.0 * n * std::numbers::ln2 -
           std::lgamma(2.0 * n + 1.0) - std::log(std::numbers::pi);
}

double trap_excitation_impl(const TrapStateParams& p, int n) {
    const double nu = p.nu;
    const double sigma = p.sigma;
    const double mod2 = nu * nu + sigma * sigma;
    double base = ((nu - 1.0) * (nu - 1.0) + sigma * sigma) / mod2;
    if (base < 0.0 && base > -1e-14) base = 0.0; // analytically non-negative
    const double log_pref = 0.5 * std::log(2.0 * nu - 1.0) - 0.5 * std::log(mod2);
    if (n == 0) return std::exp(log_pref + log_even_weight(0));
    if (base == 0.0) return 0.0;
    return std::exp(log_pref + log_even_weight(n) + n * std::log(base));
}

} // namespace

double trap_excitation(const EvolutionCoefficients& coeffs, const CoefficientSpec& spec,
                       double u, int n) {
    if (n < 0) throw ConfigError("level index must be non-negative");
    return trap_excitation_impl(trap_state_params(coeffs, spec, u), n);
}

std::vector<double> trap_excitations(const EvolutionCoefficients& coeffs,
                                     const CoefficientSpec& spec, double u, int n_max) {
    const TrapStateParams p = trap_state_params(coeffs, spec, u);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) out.push_back(trap_excitation_impl(p, n));
    return out;
}

double trap_excitation_sum(const EvolutionCoefficients& coeffs, const CoefficientSpec& spec,
                           double u) {
    const TrapStateParams p = trap_state_params(coeffs, spec, u);
    double sum = 0.0;
    for (int n = 0; n < 100000; ++n) {
        const double term = trap_excitation_impl(p, n);
        sum += term;
        if (term < 1e-18 && n > 0) break;
    }
    return sum;
}

} // namespace qprop
