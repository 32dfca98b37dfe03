#include "qprop/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qprop/errors.hpp"
#include "qprop/ode.hpp"

namespace qprop {

namespace {

// Cubic Hermite root of beta on an accepted step [t0, t1], given endpoint
// values and derivatives. The bracket is guaranteed by a sign change.
double hermite_beta_zero(double t0, double b0, double bd0, double t1, double b1, double bd1) {
    const double h = t1 - t0;
    auto eval = [&](double theta) {
        const double th2 = theta * theta;
        const double th3 = th2 * theta;
        return (2 * th3 - 3 * th2 + 1) * b0 + (th3 - 2 * th2 + theta) * h * bd0 +
               (-2 * th3 + 3 * th2) * b1 + (th3 - th2) * h * bd1;
    };
    double lo = 0.0, hi = 1.0;
    double flo = b0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return t0 + 0.5 * (lo + hi) * h;
}

} // namespace

Eigen::Index EvolutionCoefficients::index_of(double time) const {
    if (t.size() == 0) throw NumericError("coefficients hold no grid");
    const double span = std::max(t[t.size() - 1] - t[0], 1.0e-300);
    // Binary search for the closest grid point.
    Eigen::Index lo = 0, hi = t.size() - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (t[mid] <= time ? lo : hi) = mid;
    }
    const Eigen::Index best = (std::abs(t[lo] - time) <= std::abs(t[hi] - time)) ? lo : hi;
    if (std::abs(t[best] - time) > 1e-9 * span)
        throw NumericError("time " + std::to_string(time) + " is not on the computed grid");
    return best;
}

std::size_t EvolutionCoefficients::caustics_before(double time) const {
    return static_cast<std::size_t>(
        std::lower_bound(beta_zeros.begin(), beta_zeros.end(), time) - beta_zeros.begin());
}

double EvolutionCoefficients::nearest_beta_zero(double time) const {
    if (beta_zeros.empty()) return std::numeric_limits<double>::quiet_NaN();
    auto it = std::lower_bound(beta_zeros.begin(), beta_zeros.end(), time);
    double best = std::numeric_limits<double>::infinity();
    if (it != beta_zeros.end() && std::abs(*it - time) < std::abs(best - time)) best = *it;
    if (it != beta_zeros.begin() && std::abs(*(it - 1) - time) < std::abs(best - time))
        best = *(it - 1);
    return best;
}

EvolutionCoefficients compute_coefficients(const CoefficientSpec& spec,
                                           std::span<const double> grid,
                                           const ComputeOptions& opts) {
    if (grid.empty() || grid.front() != 0.0)
        throw NumericError("coefficient grid must start at t = 0");
    if (!(spec.mass > 0.0)) throw ConfigError("mass must be positive");
    if (!(spec.hbar > 0.0)) throw ConfigError("hbar must be positive");

    const expr::Expr c = expr::substitute(spec.c, spec.params);
    const expr::Expr e = expr::substitute(spec.e, spec.params);
    const double m = spec.mass;

    EvolutionCoefficients out;
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    out.t = Eigen::Map<const Eigen::ArrayXd>(grid.data(), n);
    out.alpha.resize(n);
    out.alpha_dot.resize(n);
    out.beta.resize(n);
    out.beta_dot.resize(n);
    out.gamma.resize(n);
    out.gamma_dot.resize(n);
    out.has_phase = opts.with_phase;
    if (opts.with_phase) out.phase.resize(n);

    ode::Options oopt;
    oopt.rtol = opts.rtol;
    oopt.atol = opts.atol;
    oopt.keep_trace = true;

    auto fill = [&](const auto& traj, bool with_phase) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& y = traj.states[static_cast<std::size_t>(i)];
            out.alpha[i] = y[0];
            out.alpha_dot[i] = y[1];
            out.beta[i] = y[2];
            out.beta_dot[i] = y[3];
            out.gamma[i] = y[4];
            out.gamma_dot[i] = y[5];
            if (with_phase) out.phase[i] = y[6];
        }
        // Simple zeros of beta show up as sign changes between accepted steps;
        // the step control resolves the oscillation, so none are skipped.
        for (std::size_t k = 0; k + 1 < traj.trace_times.size(); ++k) {
            const double b0 = traj.trace_states[k][2];
            const double b1 = traj.trace_states[k + 1][2];
            const double t0 = traj.trace_times[k];
            const double t1 = traj.trace_times[k + 1];
            if (b0 == 0.0 && t0 > 0.0) {
                out.beta_zeros.push_back(t0);
            } else if ((b0 < 0.0 && b1 > 0.0) || (b0 > 0.0 && b1 < 0.0)) {
                out.beta_zeros.push_back(hermite_beta_zero(t0, b0, traj.trace_states[k][3], t1,
                                                           b1, traj.trace_states[k + 1][3]));
            }
        }
        std::sort(out.beta_zeros.begin(), out.beta_zeros.end());
    };

    if (opts.with_phase) {
        using S = ode::State<7>;
        auto rhs = [&](double t, const S& y, S& dy) {
            const double w = expr::eval_expression(c, t) / m;
            const double drive = expr::eval_expression(e, t);
            dy[0] = y[1];
            dy[1] = -w * y[0];
            dy[2] = y[3];
            dy[3] = -w * y[2];
            dy[4] = y[5];
            dy[5] = -w * y[4] + drive;
            // Phase integrand -(gamma beta' - gamma' beta)^2 / (2 m beta^2);
            // the numerator is O(t^2) while beta is O(t), so the t -> 0 limit
            // is 0. An exactly zero numerator (undriven systems) keeps it zero
            // through later zeros of beta as well.
            const double num = y[4] * y[3] - y[5] * y[2];
            dy[6] = (num == 0.0) ? 0.0 : -0.5 / m * (num / y[2]) * (num / y[2]);
            if (t == 0.0) dy[6] = 0.0;
        };
        S y0 = S::Zero();
        y0[0] = 1.0; // alpha(0)
        y0[3] = 1.0; // beta'(0)
        fill(ode::integrate<7>(rhs, y0, grid, oopt), true);
    } else {
        using S = ode::State<6>;
        auto rhs = [&](double t, const S& y, S& dy) {
            const double w = expr::eval_expression(c, t) / m;
            const double drive = expr::eval_expression(e, t);
            dy[0] = y[1];
            dy[1] = -w * y[0];
            dy[2] = y[3];
            dy[3] = -w * y[2];
            dy[4] = y[5];
            dy[5] = -w * y[4] + drive;
        };
        S y0 = S::Zero();
        y0[0] = 1.0;
        y0[3] = 1.0;
        fill(ode::integrate<6>(rhs, y0, grid, oopt), false);
    }

    out.wronskian0 = out.alpha[0] * out.beta_dot[0] - out.alpha_dot[0] * out.beta[0];
    return out;
}

double greens_function(const EvolutionCoefficients& coeffs, double t, double t_prime) {
    if (t <= t_prime) {
        // Retarded response: touch the grid to validate the span, then 0.
        coeffs.index_of(t_prime);
        coeffs.index_of(t);
        return 0.0;
    }
    const Eigen::Index i = coeffs.index_of(t);
    const Eigen::Index j = coeffs.index_of(t_prime);
    const double w = coeffs.alpha[j] * coeffs.beta_dot[j] - coeffs.alpha_dot[j] * coeffs.beta[j];
    return (coeffs.alpha[j] * coeffs.beta[i] - coeffs.beta[j] * coeffs.alpha[i]) / w;
}

double wronskian_drift(const EvolutionCoefficients& coeffs) {
    return (coeffs.alpha * coeffs.beta_dot - coeffs.alpha_dot * coeffs.beta - 1.0)
        .abs()
        .maxCoeff();
}

} // namespace qprop
