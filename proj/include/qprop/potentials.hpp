#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "qprop/coefficients.hpp"

namespace qprop {

// Built-in coefficient families. The Paul trap generates
// c(t) = m omega^2 (a - 2 q cos(Omega t)) with Omega = 2 r omega, e = 0;
// in the dimensionless time u = omega t its classical equation is the Mathieu
// equation in standard form, y'' + (a - 2 q cos(2 r u)) y = 0.
struct PotentialFamily {
    FamilyTag tag = FamilyTag::Harmonic;
    double mass = 1.0;
    double hbar = 1.0;
    double omega = 1.0;
    expr::Expr drive;       // e(t) for the driven oscillator
    double a = 1.0;         // trap parameters
    double q = 0.0;
    double r = 1.0;
    expr::Expr c_custom;    // custom family coefficients
    expr::Expr e_custom;
    expr::Bindings params;  // extra bindings for drive / custom expressions
};

// Builds the CoefficientSpec for a family; validates m, hbar > 0 and r > 0
// for the trap. Family metadata is attached for downstream checks.
CoefficientSpec make_spec(const PotentialFamily& family);

// Canonical solution pair of the Mathieu equation in standard form, obtained
// by direct integration: f(0) = 1, f'(0) = 0 and g(0) = 0, g'(0) = 1. Their
// Wronskian f g' - f' g is identically 1.
struct MathieuPair {
    Eigen::ArrayXd u;
    Eigen::ArrayXd f, f_dot;
    Eigen::ArrayXd g, g_dot;
};

MathieuPair mathieu_pair(double a, double q, double r, std::span<const double> u_grid,
                         double rtol = 1e-10, double atol = 1e-12);

// Width factor of the matched evolved Gaussian, zeta(u) = 1/(f^2 + g^2).
// Strictly positive (f and g share no zero); dips below 1 signal squeezing.
Eigen::ArrayXd zeta_dimensionless(double a, double q, double r,
                                  std::span<const double> u_grid);

// Floquet classification of one (a, q) cell: integrate the canonical pair
// over one drive period u in [0, pi/r] and classify by the monodromy trace.
// stable: |trace| < 2 - eps_edge (code 1); unstable: > 2 + eps_edge (code 0);
// marginal otherwise (code 2). The monodromy determinant should be 1 (area
// preservation) and is recorded as a diagnostic.
struct StabilityVerdict {
    double a = 0.0;
    double q = 0.0;
    double abs_trace = 0.0;
    double det = 1.0;
    int stable = 2;
    std::string error; // non-empty when the cell's integration failed
};

inline constexpr double kStabilityEdge = 1e-6;

struct ScanRange {
    double lo = 0.0;
    double hi = 1.0;
    int n = 10;

    double value(int i) const {
        return n > 1 ? lo + (hi - lo) * static_cast<double>(i) / (n - 1) : lo;
    }
};

// Row-major grid over (a, q); cells are independent and evaluated on
// `threads` workers (0 = hardware concurrency). Per-cell failures are
// recorded without aborting the scan.
std::vector<StabilityVerdict> stability_scan(const ScanRange& a_range, const ScanRange& q_range,
                                             double r, int threads = 0);

} // namespace qprop
