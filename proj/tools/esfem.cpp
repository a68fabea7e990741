#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "esfem/esfem.hpp"

namespace {

constexpr int exit_solver_diverged = 2;
constexpr int exit_config_error = 3;

void print_report(const esfem::ErrorReport& report) { std::cout << esfem::format_error_csv(report); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Evolving surface finite element experiments"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
    run->add_option("--config", config_path, "path to the config file")->required();

    std::string diagnostics_out = "diagnostics.csv";
    auto* verify = app.add_subcommand("verify", "run the diagnostics suite");
    verify->add_option("--output", diagnostics_out, "where to write the residual table");

    std::string eoc_input;
    auto* eoc = app.add_subcommand("eoc", "recompute EOC columns of an errors.csv");
    eoc->add_option("--input", eoc_input, "errors.csv to read")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            const esfem::RunConfig config = esfem::load_config(config_path);
            esfem::run_config(config);
            std::cout << "wrote results to " << config.output_dir.string() << '\n';
        } else if (*verify) {
            const auto rows = esfem::run_diagnostics();
            esfem::write_diagnostics_csv(diagnostics_out, rows);
            for (const auto& r : rows) {
                std::cout << r.check << "  " << r.parameter << "  " << r.value;
                if (r.order)
                    std::cout << "  order " << *r.order;
                std::cout << '\n';
            }
        } else if (*eoc) {
            print_report(esfem::read_error_csv(eoc_input));
        }
    } catch (const esfem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const esfem::SolverDiverged& e) {
        std::cerr << "solver diverged: " << e.what() << '\n';
        return exit_solver_diverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
