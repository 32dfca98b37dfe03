#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <queue>

#include "qprop/errors.hpp"

namespace qprop::quad {

// Adaptive Gauss-Kronrod 7(15) on a finite interval. Handles moderately
// oscillatory integrands by bisecting the interval with the largest error
// estimate until the global estimate meets the tolerance.

namespace detail {

// QUADPACK QK15 abscissae and weights.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F, class V>
void kronrod15(F&& f, double a, double b, V& result, double& err) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    V fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * xgk[i]);
        fv[14 - i] = f(c + h * xgk[i]);
    }
    fv[7] = f(c);

    V gauss = wg[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    V kron = wgk[7] * fv[7];
    for (int i = 0; i < 7; ++i) kron += wgk[i] * (fv[i] + fv[14 - i]);

    result = h * kron;
    err = std::abs(h) * std::abs(kron - gauss);
}

template <class V>
struct Segment {
    double a, b, err;
    V value;
    bool operator<(const Segment& o) const { return err < o.err; }
};

} // namespace detail

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 20000;
};

// V is double or std::complex<double>.
template <class V, class F>
V integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    using Seg = detail::Segment<V>;
    std::priority_queue<Seg> queue;

    V total;
    double total_err;
    detail::kronrod15(f, a, b, total, total_err);
    queue.push({a, b, total_err, total});
    int n_intervals = 1;

    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (n_intervals >= opt.max_intervals)
            throw QuadratureError("quadrature did not converge (interval budget exhausted)");
        const Seg seg = queue.top();
        queue.pop();
        const double mid = 0.5 * (seg.a + seg.b);
        if (mid <= seg.a || mid >= seg.b)
            throw QuadratureError("quadrature did not converge (interval underflow)");

        V lv, rv;
        double le, re;
        detail::kronrod15(f, seg.a, mid, lv, le);
        detail::kronrod15(f, mid, seg.b, rv, re);
        total += lv + rv - seg.value;
        total_err += le + re - seg.err;
        queue.push({seg.a, mid, le, lv});
        queue.push({mid, seg.b, re, rv});
        ++n_intervals;
    }
    return total;
}

inline double integrate_real(const std::function<double(double)>& f, double a, double b,
                             const QuadOptions& opt = {}) {
    return integrate<double>(f, a, b, opt);
}

inline std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                              double a, double b, const QuadOptions& opt = {}) {
    return integrate<std::complex<double>>(f, a, b, opt);
}

} // namespace qprop::quad
