#include "qprop/potentials.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "qprop/errors.hpp"
#include "qprop/ode.hpp"

namespace qprop {

CoefficientSpec make_spec(const PotentialFamily& family) {
    if (!(family.mass > 0.0)) throw ConfigError("mass must be positive");
    if (!(family.hbar > 0.0)) throw ConfigError("hbar must be positive");

    CoefficientSpec spec;
    spec.mass = family.mass;
    spec.hbar = family.hbar;
    spec.params = family.params;

    FamilyInfo info;
    info.tag = family.tag;
    info.omega = family.omega;

    switch (family.tag) {
        case FamilyTag::Free:
            spec.c = expr::parse_expression("0");
            spec.e = expr::parse_expression("0");
            break;
        case FamilyTag::Harmonic:
            if (!(family.omega > 0.0)) throw ConfigError("omega must be positive");
            spec.c = expr::parse_expression("m*omega^2");
            spec.e = expr::parse_expression("0");
            spec.params["m"] = family.mass;
            spec.params["omega"] = family.omega;
            break;
        case FamilyTag::DrivenHarmonic:
            if (!(family.omega > 0.0)) throw ConfigError("omega must be positive");
            if (!family.drive.valid())
                throw ConfigError("driven-harmonic family needs a drive expression");
            spec.c = expr::parse_expression("m*omega^2");
            spec.e = family.drive;
            spec.params["m"] = family.mass;
            spec.params["omega"] = family.omega;
            break;
        case FamilyTag::PaulTrap:
            if (!(family.omega > 0.0)) throw ConfigError("omega must be positive");
            if (!(family.r > 0.0)) throw ConfigError("trap frequency ratio r must be positive");
            spec.c = expr::parse_expression("m*omega^2*(a - 2*q*cos(2*r*omega*t))");
            spec.e = expr::parse_expression("0");
            spec.params["m"] = family.mass;
            spec.params["omega"] = family.omega;
            spec.params["a"] = family.a;
            spec.params["q"] = family.q;
            spec.params["r"] = family.r;
            info.a = family.a;
            info.q = family.q;
            info.r = family.r;
            break;
        case FamilyTag::Custom:
            if (!family.c_custom.valid() || !family.e_custom.valid())
                throw ConfigError("custom family needs both c and e expressions");
            spec.c = family.c_custom;
            spec.e = family.e_custom;
            break;
    }

    spec.family = info;
    return spec;
}

MathieuPair mathieu_pair(double a, double q, double r, std::span<const double> u_grid,
                         double rtol, double atol) {
    using S = ode::State<4>;
    auto rhs = [a, q, r](double u, const S& y, S& dy) {
        const double k = a - 2.0 * q * std::cos(2.0 * r * u);
        dy[0] = y[1];
        dy[1] = -k * y[0];
        dy[2] = y[3];
        dy[3] = -k * y[2];
    };
    S y0;
    y0 << 1.0, 0.0, 0.0, 1.0;
    ode::Options opt;
    opt.rtol = rtol;
    opt.atol = atol;
    const auto traj = ode::integrate<4>(rhs, y0, u_grid, opt);

    MathieuPair out;
    const Eigen::Index n = static_cast<Eigen::Index>(u_grid.size());
    out.u = Eigen::Map<const Eigen::ArrayXd>(u_grid.data(), n);
    out.f.resize(n);
    out.f_dot.resize(n);
    out.g.resize(n);
    out.g_dot.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& y = traj.states[static_cast<std::size_t>(i)];
        out.f[i] = y[0];
        out.f_dot[i] = y[1];
        out.g[i] = y[2];
        out.g_dot[i] = y[3];
    }
    return out;
}

Eigen::ArrayXd zeta_dimensionless(double a, double q, double r,
                                  std::span<const double> u_grid) {
    const MathieuPair pair = mathieu_pair(a, q, r, u_grid);
    return (pair.f.square() + pair.g.square()).inverse();
}

std::vector<StabilityVerdict> stability_scan(const ScanRange& a_range, const ScanRange& q_range,
                                             double r, int threads) {
    if (!(r > 0.0)) throw ConfigError("trap frequency ratio r must be positive");
    if (a_range.n < 1 || q_range.n < 1) throw ConfigError("scan ranges must be non-empty");
    if (!std::isfinite(a_range.lo) || !std::isfinite(a_range.hi) ||
        !std::isfinite(q_range.lo) || !std::isfinite(q_range.hi))
        throw ConfigError("scan ranges must be finite");

    const int total = a_range.n * q_range.n;
    std::vector<StabilityVerdict> cells(static_cast<std::size_t>(total));
    const double period = std::numbers::pi / r;
    const double grid[2] = {0.0, period};

    auto run_cell = [&](int idx) {
        StabilityVerdict& v = cells[static_cast<std::size_t>(idx)];
        v.a = a_range.value(idx / q_range.n);
        v.q = q_range.value(idx % q_range.n);
        try {
            const MathieuPair p = mathieu_pair(v.a, v.q, r, grid);
            Eigen::Matrix2d monodromy;
            monodromy << p.f[1], p.g[1], p.f_dot[1], p.g_dot[1];
            v.abs_trace = std::abs(monodromy.trace());
            v.det = monodromy.determinant();
            if (v.abs_trace < 2.0 - kStabilityEdge)
                v.stable = 1;
            else if (v.abs_trace > 2.0 + kStabilityEdge)
                v.stable = 0;
            else
                v.stable = 2;
        } catch (const Error& err) {
            v.error = err.what();
        }
    };

    int n_workers = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min(n_workers, total);

    if (n_workers == 1) {
        for (int i = 0; i < total; ++i) run_cell(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) run_cell(i);
            });
        for (auto& th : pool) th.join();
    }
    return cells;
}

} // namespace qprop
