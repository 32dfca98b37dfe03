#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qprop/potentials.hpp"

namespace qprop {

// Parsed and validated run configuration. The file format is flat INI-style
// sections with `key = value` lines and `#` comments:
//
//   [system]        m, hbar, omega (reference frequency; enables the u column)
//   [potential]     family = free|harmonic|driven-harmonic|paul-trap|custom
//                   a, q, r (trap), drive (driven), c_expr/e_expr (custom)
//   [parameters]    extra named constants for expressions
//   [initial_state] lambda0 = matched | <number>
//   [integration]   t_max or u_max, output_step, rtol, atol
//   [outputs]       columns, n_max, path, format = csv|json
//   [kernel]        t, x_min/x_max/x_points, xp_min/xp_max/xp_points
//   [scan]          a_min/a_max/a_points, q_min/q_max/q_points, r
struct GridAxis {
    double lo = -5.0;
    double hi = 5.0;
    int points = 101;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
    // [system]
    double mass = 1.0;
    double hbar = 1.0;
    std::optional<double> omega;

    // [potential] + [parameters]
    PotentialFamily family;

    // [initial_state]
    bool matched_width = true;
    double lambda0 = 1.0; // used when !matched_width

    // [integration]
    std::optional<double> t_max;
    std::optional<double> u_max; // requires omega
    double output_step = 0.1;    // in the same variable as t_max / u_max
    double rtol = 1e-10;
    double atol = 1e-12;

    // [outputs]
    std::vector<std::string> columns; // empty = family default
    int n_max = 0;                    // trap occupation columns P0..P(2 n_max)
    std::string path = "-";           // "-" = stdout (no sidecar summary)
    OutputFormat format = OutputFormat::Csv;

    // [kernel]
    std::optional<double> kernel_t;
    GridAxis kernel_x;
    GridAxis kernel_xp;

    // [scan]
    std::optional<ScanRange> scan_a;
    std::optional<ScanRange> scan_q;
    double scan_r = 1.0;

    std::string source_path; // for diagnostics
};

// Loads and validates a configuration file. Expression fields are pre-parsed;
// every error carries the file name and line number. Throws ConfigError or
// IoError.
RunConfig load_config(const std::string& path);

} // namespace qprop
