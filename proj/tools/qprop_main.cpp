#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "qprop/errors.hpp"
#include "qprop/run.hpp"

namespace {

struct Overrides {
    std::string output;
    std::string format;
    double rtol = 0.0;
    double atol = 0.0;
};

void apply(qprop::RunConfig& cfg, const Overrides& ov) {
    if (!ov.output.empty()) cfg.path = ov.output;
    if (!ov.format.empty()) {
        if (ov.format == "csv") cfg.format = qprop::OutputFormat::Csv;
        else if (ov.format == "json") cfg.format = qprop::OutputFormat::Json;
        else throw qprop::ConfigError("--format must be csv or json");
    }
    if (ov.rtol > 0.0) cfg.rtol = ov.rtol;
    if (ov.atol > 0.0) cfg.atol = ov.atol;
}

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
    cmd->add_option("config", config_path, "run configuration file")->required();
    cmd->add_option("--output", ov.output, "output path ('-' for stdout)");
    cmd->add_option("--format", ov.format, "output format: csv or json");
    cmd->add_option("--rtol", ov.rtol, "relative integration tolerance override");
    cmd->add_option("--atol", ov.atol, "absolute integration tolerance override");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact propagators and Gaussian dynamics of one-dimensional "
                 "time-dependent quadratic Hamiltonians"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    CLI::App* simulate = app.add_subcommand("simulate", "time-series run (CSV/JSON)");
    add_common(simulate, config_path, ov);
    CLI::App* kernel = app.add_subcommand("kernel", "propagator grid at a fixed time");
    add_common(kernel, config_path, ov);
    CLI::App* scan = app.add_subcommand("scan", "Floquet stability scan over (a, q)");
    add_common(scan, config_path, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    }

    try {
        qprop::RunConfig cfg = qprop::load_config(config_path);
        apply(cfg, ov);
        if (simulate->parsed()) {
            run_simulate(cfg);
        } else if (kernel->parsed()) {
            run_kernel(cfg);
        } else {
            run_scan(cfg);
        }
        return 0;
    } catch (const qprop::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const qprop::NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 3;
    } catch (const qprop::IoError& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
