#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "solver.hpp"

namespace fd {

/// One sweep/solve result in the fixed CSV column order.
struct CsvRow {
    int N = 0;
    double s = 0, p = 0, omega = 0, eps = 0;
    double theta = 0, tau = 0, mu = 0;
    bool feasible = false;
    double margin = 0, energy = 0, residual = 0;
    double gamma_fit = 0, gamma_pred_lo = 0, gamma_pred_hi = 0, r_squared = 0;
    std::string verdict;
    double wall_seconds = 0;
    std::string error_class;  ///< empty, "infeasible" or "convergence"
};

std::string csv_header();
std::string format_row(const CsvRow& row);

void cmd_thresholds(const ExperimentConfig& cfg, std::ostream& out);
/// Throws InfeasibleError when no certificate applies.
void cmd_certify(const ExperimentConfig& cfg, std::ostream& out);
void cmd_amu(const ExperimentConfig& cfg, std::ostream& out);
void cmd_fraclap_eval(const ExperimentConfig& cfg, std::ostream& out);

struct SolveArtifacts {
    std::string profile_path, metadata_path, csv_path, trace_path, plot_path;
    OriginalSolution solution;
    CsvRow row;
};

/// solve_original plus the profile, metadata, CSV row and margin trace under cfg.out_dir.
SolveArtifacts cmd_solve(const ExperimentConfig& cfg, std::ostream& out);

/// One row per (p, omega, eps) cell; cells never abort the sweep.
std::vector<CsvRow> cmd_sweep(const ExperimentConfig& cfg, std::ostream& out);

/// Operator self-test for mu in {1, N-2s, N+1} and the gradient check.  Returns pass/fail.
bool cmd_selftest(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace fd
