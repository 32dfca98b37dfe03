#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qprop/errors.hpp"

namespace qprop::ode {

// Adaptive Dormand-Prince 5(4) for small dense systems. States are fixed-size
// Eigen vectors; the right-hand side is any callable
//   rhs(double t, const State<N>& y, State<N>& dydt).
// Output states are produced exactly at the requested grid via the pair's
// quartic dense-output interpolant (the interpolant reproduces the accepted
// step endpoints bit-for-bit at theta = 0, 1).

template <int N>
using State = Eigen::Matrix<double, N, 1>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::int64_t max_steps = 10'000'000;
    bool keep_trace = false; // record every accepted step endpoint
};

template <int N>
struct Trajectory {
    std::vector<double> times;          // equals the requested grid
    std::vector<State<N>> states;
    std::vector<double> step_sizes;     // accepted step sizes (diagnostics)
    std::vector<double> trace_times;    // accepted endpoints, with keep_trace
    std::vector<State<N>> trace_states;
};

namespace detail {

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
// Difference between the 5th- and embedded 4th-order solutions.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output coefficients.
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace detail

template <int N, class Rhs>
Trajectory<N> integrate(Rhs&& rhs, const State<N>& y0, std::span<const double> grid,
                        const Options& opt = {}) {
    namespace d = detail;
    if (grid.empty()) throw NumericError("output grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw NumericError("output grid must be strictly increasing");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
        throw NumericError("tolerances must be positive");

    Trajectory<N> out;
    out.times.assign(grid.begin(), grid.end());
    out.states.resize(grid.size());

    auto check_finite = [](const State<N>& v, double t, const char* what) {
        if (!v.allFinite()) throw OdeError(std::string(what), t);
    };

    double t = grid.front();
    State<N> y = y0;
    check_finite(y, t, "non-finite initial state");
    out.states[0] = y;
    std::size_t next_out = 1;
    if (opt.keep_trace) {
        out.trace_times.push_back(t);
        out.trace_states.push_back(y);
    }
    if (next_out == grid.size()) return out;

    const double t_end = grid.back();
    const double span = t_end - t;
    const double h_min = 1e-14 * span;

    State<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
    rhs(t, y, k1);
    check_finite(k1, t, "non-finite right-hand side");

    // Initial step size: Hairer's heuristic, then refined by the controller.
    double h;
    {
        double d0 = 0.0, d1n = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1n;
        h = std::min(h, span);
    }

    std::int64_t accepted = 0;
    bool rejected_last = false;

    while (t < t_end) {
        if (accepted >= opt.max_steps)
            throw OdeError("step budget exhausted (" + std::to_string(opt.max_steps) + " steps)",
                           t);
        if (h < h_min)
            throw OdeError("step size underflow (stiff or singular right-hand side)", t);
        bool last_step = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last_step = true;
        }

        ytmp = y + h * (d::a21 * k1);
        rhs(t + d::c2 * h, ytmp, k2);
        ytmp = y + h * (d::a31 * k1 + d::a32 * k2);
        rhs(t + d::c3 * h, ytmp, k3);
        ytmp = y + h * (d::a41 * k1 + d::a42 * k2 + d::a43 * k3);
        rhs(t + d::c4 * h, ytmp, k4);
        ytmp = y + h * (d::a51 * k1 + d::a52 * k2 + d::a53 * k3 + d::a54 * k4);
        rhs(t + d::c5 * h, ytmp, k5);
        ytmp = y + h * (d::a61 * k1 + d::a62 * k2 + d::a63 * k3 + d::a64 * k4 + d::a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (d::a71 * k1 + d::a73 * k3 + d::a74 * k4 + d::a75 * k5 + d::a76 * k6);
        rhs(t + h, ynew, k7);

        if (!k2.allFinite() || !k3.allFinite() || !k4.allFinite() || !k5.allFinite() ||
            !k6.allFinite() || !k7.allFinite() || !ynew.allFinite())
            throw OdeError("non-finite right-hand side", t + h);

        yerr = h * (d::e1 * k1 + d::e3 * k3 + d::e4 * k4 + d::e5 * k5 + d::e6 * k6 + d::e7 * k7);
        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc =
                opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sc) * (yerr[i] / sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            const double t_new = last_step ? t_end : t + h;
            // Dense output for grid points inside (t, t_new].
            State<N> rc2 = ynew - y;
            State<N> rc3 = h * k1 - rc2;
            State<N> rc4 = rc2 - h * k7 - rc3;
            State<N> rc5 = h * (d::d1 * k1 + d::d3 * k3 + d::d4 * k4 + d::d5 * k5 +
                                d::d6 * k6 + d::d7 * k7);
            while (next_out < grid.size() && grid[next_out] <= t_new) {
                const double tq = grid[next_out];
                const double theta = (tq - t) / h;
                const double theta1 = 1.0 - theta;
                State<N> yq =
                    y + theta * (rc2 + theta1 * (rc3 + theta * (rc4 + theta1 * rc5)));
                if (theta >= 1.0) yq = ynew;
                check_finite(yq, tq, "non-finite state");
                out.states[next_out] = yq;
                ++next_out;
            }

            t = t_new;
            y = ynew;
            k1 = k7; // FSAL
            ++accepted;
            out.step_sizes.push_back(h);
            if (opt.keep_trace) {
                out.trace_times.push_back(t);
                out.trace_states.push_back(y);
            }

            double fac = 0.9 * std::pow(err > 0.0 ? err : 1e-30, -0.2);
            fac = std::min(rejected_last ? 1.0 : 10.0, std::max(0.2, fac));
            h *= fac;
            rejected_last = false;
        } else {
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::max(0.2, fac);
            rejected_last = true;
        }
    }

    if (next_out != grid.size())
        throw OdeError("internal error: output grid not fully covered", t);
    return out;
}

} // namespace qprop::ode
