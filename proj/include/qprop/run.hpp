#pragma once

#include "qprop/config.hpp"

namespace qprop {

struct SimulateSummary {
    double min_zeta = 0.0;
    double min_zeta_t = 0.0;
    double wronskian_drift = 0.0;
};

// Time-series run: one row per output time. Writes CSV or JSON to the
// configured path ("-" = stdout) plus a `<path>.summary.json` sidecar with the
// minimum width factor and the Wronskian drift. Partial output is removed on
// failure.
SimulateSummary run_simulate(const RunConfig& cfg);

// Kernel grid at a fixed time: rows (x, xp, re_k, im_k).
void run_kernel(const RunConfig& cfg);

// Floquet stability scan over (a, q): rows (a, q, abs_trace, stable, error)
// with stable coded 0 = unstable, 1 = stable, 2 = marginal. Reads the worker
// count from the QPROP_SCAN_THREADS environment variable.
void run_scan(const RunConfig& cfg);

} // namespace qprop
