#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fracdecay/commands.hpp"
#include "fracdecay/config.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, infeasible = 3, convergence = 4 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracdecay: fractional Schrodinger concentration and decay toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir;
    double tol = 0.0;
    int jobs = -1;
    long long seed = -1;
    bool show_keys = false;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--tol", tol, "solver residual tolerance (overrides solver.tol)");
    app.add_option("--jobs", jobs, "worker threads (overrides solver.jobs)");
    app.add_option("--seed", seed, "seed for randomized directions");
    app.add_flag("--config-keys", show_keys, "print the configuration key reference and exit");

    const char* names[] = {"thresholds", "certify", "amu", "fraclap-eval", "solve", "sweep", "selftest", "keys"};
    const char* docs[] = {"print 2_s^*, q_*, q_omega and p_*",
                          "nonexistence certificate below the threshold",
                          "A_mu for the configured mu list",
                          "(-Delta)^s w_mu at the configured radii",
                          "solve, de-penalize and fit the tail",
                          "grid over (p, omega, eps) into a CSV",
                          "operator oracle and gradient checks",
                          "configuration key reference"};
    for (int i = 0; i < 8; ++i) app.add_subcommand(names[i], docs[i]);

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    if (cmd == "keys" || show_keys) {
        std::cout << fd::config_reference();
        return Exit::ok;
    }
    try {
        fd::ExperimentConfig cfg = config_path.empty() ? fd::parse_config("") : fd::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (tol > 0.0) cfg.solver.tol = tol;
        if (jobs >= 0) cfg.solver.jobs = jobs;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

        if (cmd == "thresholds") fd::cmd_thresholds(cfg, std::cout);
        else if (cmd == "certify") fd::cmd_certify(cfg, std::cout);
        else if (cmd == "amu") fd::cmd_amu(cfg, std::cout);
        else if (cmd == "fraclap-eval") fd::cmd_fraclap_eval(cfg, std::cout);
        else if (cmd == "solve") fd::cmd_solve(cfg, std::cout);
        else if (cmd == "sweep") fd::cmd_sweep(cfg, std::cout);
        else if (cmd == "selftest") return fd::cmd_selftest(cfg, std::cout) ? Exit::ok : Exit::convergence;
    } catch (const fd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return Exit::config_error;
    } catch (const fd::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return Exit::infeasible;
    } catch (const fd::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return Exit::convergence;
    } catch (const std::domain_error& e) {
        std::cerr << "inadmissible parameters: " << e.what() << "\n";
        return Exit::config_error;
    }
    return Exit::ok;
}
