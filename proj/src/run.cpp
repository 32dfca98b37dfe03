#include "qprop/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "qprop/errors.hpp"
#include "qprop/gaussian.hpp"
#include "qprop/kernel.hpp"
#include "qprop/observables.hpp"

namespace qprop {

namespace {

// Shortest decimal that round-trips, for bit-stable CSV diffing.
std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Output file that is removed again unless the run completes.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) : path_(path) {
        if (path_ != "-") {
            file_.open(path_, std::ios::binary);
            if (!file_) throw IoError("cannot open output file '" + path_ + "'");
        }
    }

    ~OutputTarget() {
        if (!committed_ && path_ != "-") {
            file_.close();
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

    std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

    void commit() {
        if (path_ != "-") {
            file_.flush();
            if (!file_) throw IoError("failed writing output file '" + path_ + "'");
        } else {
            std::cout.flush();
        }
        committed_ = true;
    }

    bool is_file() const { return path_ != "-"; }

private:
    std::string path_;
    std::ofstream file_;
    bool committed_ = false;
};

struct Column {
    std::string name;
    std::vector<double> values;
};

void write_table(OutputTarget& out, OutputFormat format, const std::vector<Column>& columns,
                 std::size_t rows) {
    std::ostream& os = out.stream();
    if (format == OutputFormat::Csv) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << columns[c].name;
        os << "\n";
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t c = 0; c < columns.size(); ++c)
                os << (c ? "," : "") << format_double(columns[c].values[i]);
            os << "\n";
        }
    } else {
        nlohmann::json j;
        j["columns"] = nlohmann::json::array();
        for (const auto& c : columns) j["columns"].push_back(c.name);
        j["rows"] = nlohmann::json::array();
        for (std::size_t i = 0; i < rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& c : columns) row.push_back(c.values[i]);
            j["rows"].push_back(std::move(row));
        }
        os << j.dump(2) << "\n";
    }
}

std::vector<double> build_grid(double span, double step) {
    const auto n = static_cast<std::size_t>(std::llround(span / step));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = step * static_cast<double>(i);
    if (grid.back() > span) grid.back() = span;
    return grid;
}

double matched_or_explicit_lambda0(const RunConfig& cfg) {
    if (!cfg.matched_width) return cfg.lambda0;
    return cfg.mass * cfg.family.omega / cfg.hbar;
}

bool is_driven_like(FamilyTag tag) {
    return tag == FamilyTag::Harmonic || tag == FamilyTag::DrivenHarmonic;
}

std::vector<std::string> default_columns(const RunConfig& cfg) {
    std::vector<std::string> cols;
    if (cfg.family.tag == FamilyTag::PaulTrap) {
        cols = {"u", "zeta"};
        if (cfg.matched_width) {
            cols.push_back("energy_norm");
            for (int n = 0; n <= cfg.n_max; ++n)
                if (cfg.n_max > 0) cols.push_back("P" + std::to_string(2 * n));
        }
        return cols;
    }
    cols = {"t"};
    if (cfg.omega) cols.push_back("u");
    for (const char* c : {"alpha", "beta", "gamma", "gamma_dot", "lambda_phase", "zeta"})
        cols.push_back(c);
    if (is_driven_like(cfg.family.tag) && cfg.matched_width) {
        for (const char* c : {"energy", "com_energy", "du_dt", "trace_drho_h", "trace_rho_dh",
                              "chi", "work_rate_source", "work_rate_trace",
                              "heat_rate_balanced", "heat_rate_trace"})
            cols.push_back(c);
    }
    return cols;
}

// The trap energy and occupation formulas assume the matched initial width.
void check_trap_columns(const RunConfig& cfg, const std::vector<std::string>& columns) {
    if (cfg.family.tag != FamilyTag::PaulTrap || cfg.matched_width) return;
    for (const auto& name : columns)
        if (name == "energy" || name == "energy_norm" || (!name.empty() && name[0] == 'P'))
            throw ConfigError("column '" + name +
                              "' needs the matched initial width (lambda0 = matched)");
}

} // namespace

SimulateSummary run_simulate(const RunConfig& cfg) {
    const CoefficientSpec spec = make_spec(cfg.family);
    const double omega = cfg.family.omega;

    double t_span;
    if (cfg.u_max)
        t_span = *cfg.u_max / omega;
    else if (cfg.t_max)
        t_span = *cfg.t_max;
    else
        throw ConfigError("simulate needs integration.t_max or integration.u_max");
    const double t_step = cfg.u_max ? cfg.output_step / omega : cfg.output_step;

    std::vector<std::string> columns = cfg.columns.empty() ? default_columns(cfg) : cfg.columns;
    check_trap_columns(cfg, columns);
    const bool want_phase =
        std::find(columns.begin(), columns.end(), "lambda_phase") != columns.end();

    const std::vector<double> grid = build_grid(t_span, t_step);
    ComputeOptions copts;
    copts.rtol = cfg.rtol;
    copts.atol = cfg.atol;
    copts.with_phase = want_phase;
    const EvolutionCoefficients coeffs = compute_coefficients(spec, grid, copts);

    const double lambda0 = matched_or_explicit_lambda0(cfg);
    const std::vector<GaussianState> states = evolve_gaussian(coeffs, spec, lambda0);
    const std::size_t rows = states.size();

    std::vector<Column> table;
    table.reserve(columns.size());
    for (const std::string& name : columns) {
        Column col;
        col.name = name;
        col.values.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const Eigen::Index k = static_cast<Eigen::Index>(i);
            const GaussianState& s = states[i];
            double v;
            if (name == "t") v = coeffs.t[k];
            else if (name == "u") v = omega * coeffs.t[k];
            else if (name == "alpha") v = coeffs.alpha[k];
            else if (name == "alpha_dot") v = coeffs.alpha_dot[k];
            else if (name == "beta") v = coeffs.beta[k];
            else if (name == "beta_dot") v = coeffs.beta_dot[k];
            else if (name == "gamma") v = coeffs.gamma[k];
            else if (name == "gamma_dot") v = coeffs.gamma_dot[k];
            else if (name == "lambda_phase") v = coeffs.phase[k];
            else if (name == "zeta") v = s.zeta;
            else if (name == "energy")
                v = cfg.family.tag == FamilyTag::PaulTrap
                        ? trap_energy(coeffs, spec, omega * coeffs.t[k])
                        : driven_energy(s, spec);
            else if (name == "energy_norm")
                v = 2.0 * trap_energy(coeffs, spec, omega * coeffs.t[k]) / (cfg.hbar * omega);
            else if (name == "com_energy") v = com_energy(s, spec);
            else if (name == "du_dt") v = thermo_rates(s, spec).du_dt;
            else if (name == "trace_drho_h") v = thermo_rates(s, spec).trace_drho_h;
            else if (name == "trace_rho_dh") v = thermo_rates(s, spec).trace_rho_dh;
            else if (name == "chi") v = thermo_rates(s, spec).chi;
            else if (name == "work_rate_source") v = thermo_rates(s, spec).work_rate_source;
            else if (name == "work_rate_trace") v = thermo_rates(s, spec).work_rate_trace;
            else if (name == "heat_rate_balanced") v = thermo_rates(s, spec).heat_rate_balanced;
            else if (name == "heat_rate_trace") v = thermo_rates(s, spec).heat_rate_trace;
            else if (name.size() > 1 && name[0] == 'P') {
                int level = 0;
                const char* first = name.data() + 1;
                auto res = std::from_chars(first, name.data() + name.size(), level);
                if (res.ec != std::errc() || res.ptr != name.data() + name.size() ||
                    level < 0 || level % 2 != 0)
                    throw ConfigError("unknown output column '" + name + "'");
                v = trap_excitation(coeffs, spec, omega * coeffs.t[k], level / 2);
            } else
                throw ConfigError("unknown output column '" + name + "'");
            col.values[i] = v;
        }
        table.push_back(std::move(col));
    }

    SimulateSummary summary;
    summary.min_zeta = min_zeta(states);
    summary.min_zeta_t = 0.0;
    for (const auto& s : states)
        if (s.zeta == summary.min_zeta) {
            summary.min_zeta_t = s.t;
            break;
        }
    summary.wronskian_drift = wronskian_drift(coeffs);

    OutputTarget out(cfg.path);
    write_table(out, cfg.format, table, rows);
    out.commit();

    if (out.is_file()) {
        nlohmann::json j;
        j["min_zeta"] = summary.min_zeta;
        j["min_zeta_t"] = summary.min_zeta_t;
        if (cfg.omega) j["min_zeta_u"] = *cfg.omega * summary.min_zeta_t;
        j["wronskian_drift"] = summary.wronskian_drift;
        std::ofstream side(cfg.path + ".summary.json", std::ios::binary);
        if (!side) throw IoError("cannot open sidecar '" + cfg.path + ".summary.json'");
        side << j.dump(2) << "\n";
        if (!side) throw IoError("failed writing sidecar summary");
    }
    return summary;
}

void run_kernel(const RunConfig& cfg) {
    if (!cfg.kernel_t) throw ConfigError("kernel run needs kernel.t");
    const double t = *cfg.kernel_t;
    if (!(t > 0.0)) throw ConfigError("kernel.t must be positive");

    const CoefficientSpec spec = make_spec(cfg.family);
    const std::vector<double> grid = {0.0, 0.5 * t, t};
    ComputeOptions copts;
    copts.rtol = cfg.rtol;
    copts.atol = cfg.atol;
    const EvolutionCoefficients coeffs = compute_coefficients(spec, grid, copts);
    const KernelForm form = kernel_at(coeffs, spec, t);

    auto axis_values = [](const GridAxis& ax) {
        std::vector<double> v(static_cast<std::size_t>(ax.points));
        for (int i = 0; i < ax.points; ++i)
            v[static_cast<std::size_t>(i)] =
                ax.points > 1 ? ax.lo + (ax.hi - ax.lo) * i / (ax.points - 1) : ax.lo;
        return v;
    };
    const std::vector<double> xs = axis_values(cfg.kernel_x);
    const std::vector<double> xps = axis_values(cfg.kernel_xp);

    std::vector<Column> table(4);
    table[0].name = "x";
    table[1].name = "xp";
    table[2].name = "re_k";
    table[3].name = "im_k";
    for (double x : xs)
        for (double xp : xps) {
            const std::complex<double> k = evaluate_kernel(form, x, xp);
            table[0].values.push_back(x);
            table[1].values.push_back(xp);
            table[2].values.push_back(k.real());
            table[3].values.push_back(k.imag());
        }

    OutputTarget out(cfg.path);
    write_table(out, cfg.format, table, table[0].values.size());
    out.commit();
}

void run_scan(const RunConfig& cfg) {
    if (!cfg.scan_a || !cfg.scan_q) throw ConfigError("scan run needs a [scan] section");

    int threads = 0;
    if (const char* env = std::getenv("QPROP_SCAN_THREADS")) {
        int v = 0;
        auto res = std::from_chars(env, env + std::string_view(env).size(), v);
        if (res.ec == std::errc() && v > 0) threads = v;
    }

    const std::vector<StabilityVerdict> cells =
        stability_scan(*cfg.scan_a, *cfg.scan_q, cfg.scan_r, threads);

    OutputTarget out(cfg.path);
    std::ostream& os = out.stream();
    if (cfg.format == OutputFormat::Csv) {
        os << "a,q,abs_trace,stable,error\n";
        for (const auto& c : cells) {
            std::string err = c.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            os << format_double(c.a) << "," << format_double(c.q) << ","
               << format_double(c.abs_trace) << "," << c.stable << "," << err << "\n";
        }
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& c : cells) {
            nlohmann::json cell;
            cell["a"] = c.a;
            cell["q"] = c.q;
            cell["abs_trace"] = c.abs_trace;
            cell["stable"] = c.stable;
            if (!c.error.empty()) cell["error"] = c.error;
            j.push_back(std::move(cell));
        }
        os << j.dump(2) << "\n";
    }
    out.commit();
}

} // namespace qprop
