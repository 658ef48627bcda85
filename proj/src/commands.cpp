#include "fracdecay/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "fracdecay/fraclap.hpp"

namespace fd {

namespace {

namespace fs = std::filesystem;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string exact(const Rational& q) {
    std::string r = to_string(q);
    if (denominator(q) == 1) return r;
    return r + " (" + num(to_double(q)) + ")";
}

double omega_column(const PotentialSpec& pot) {
    switch (pot.kind) {
        case PotentialKind::constant: return 0.0;
        case PotentialKind::logarithmic_decay: return std::nan("");
        case PotentialKind::compact_support: return std::numeric_limits<double>::infinity();
        default: return pot.omega;
    }
}

void fill_plan(CsvRow& row, const PenalizationPlan& plan) {
    row.theta = plan.theta_d();
    row.tau = plan.tau_d();
    row.mu = plan.mu_d();
}

void fill_solution(CsvRow& row, const OriginalSolution& sol) {
    fill_plan(row, sol.plan);
    row.eps = sol.params.eps;
    row.margin = sol.margin.margin;
    row.energy = sol.state.energy;
    row.residual = sol.state.residual_norm;
    row.gamma_fit = sol.decay.fitted_gamma;
    row.r_squared = sol.decay.r_squared;
    if (sol.decay.has_prediction) {
        row.gamma_pred_lo = sol.decay.predicted.upper.value;
        row.gamma_pred_hi = sol.decay.predicted.lower.value;
        row.verdict = to_string(sol.decay.verdict);
    } else {
        row.gamma_pred_lo = row.gamma_pred_hi = std::nan("");
        row.verdict = "no_prediction";
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    return f;
}

void write_trace(const fs::path& path, const std::vector<MarginSample>& trace) {
    auto f = open_out(path);
    f << "eps,margin,converged,note\n";
    for (const auto& m : trace) {
        std::string note = m.note;
        for (auto& ch : note)
            if (ch == ',' || ch == '\n') ch = ';';
        f << num(m.eps) << ',' << num(m.margin) << ',' << (m.converged ? 1 : 0) << ',' << note << '\n';
    }
}

}  // namespace

std::string csv_header() {
    return "N,s,p,omega,eps,theta,tau,mu,feasible,margin,energy,residual,gamma_fit,gamma_pred_lo,"
           "gamma_pred_hi,r_squared,verdict,wall_seconds,error_class";
}

std::string format_row(const CsvRow& r) {
    std::string out = std::to_string(r.N);
    for (double x : {r.s, r.p, r.omega, r.eps, r.theta, r.tau, r.mu}) out += "," + num(x);
    out += r.feasible ? ",1" : ",0";
    for (double x : {r.margin, r.energy, r.residual, r.gamma_fit, r.gamma_pred_lo, r.gamma_pred_hi, r.r_squared})
        out += "," + num(x);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_seconds);
    out += "," + r.verdict + "," + buf + "," + r.error_class;
    return out;
}

void cmd_thresholds(const ExperimentConfig& cfg, std::ostream& out) {
    const DecayClass c = cfg.decay_class();
    out << "N        = " << cfg.N << "\n";
    out << "s        = " << exact(cfg.s) << "\n";
    out << "class    = " << to_string(c) << "\n";
    out << "2_s^*    = " << exact(critical_exponent(cfg.N, cfg.s)) << "\n";
    out << "q_*      = " << exact(q_star(cfg.N, cfg.s)) << "\n";
    if (c.tag == DecayTag::slow || c.tag == DecayTag::upper_slow)
        out << "q_omega  = " << exact(q_omega(cfg.N, cfg.s, c.omega)) << "\n";
    else if (c.tag == DecayTag::log)
        out << "q_omega  = n/a (logarithmic decay)\n";
    else
        out << "q_omega  = n/a (fast decay)\n";
    out << "p_*      = " << exact(nonexistence_threshold(cfg.N, cfg.s, c)) << "\n";
}

void cmd_certify(const ExperimentConfig& cfg, std::ostream& out) {
    const DecayClass c = cfg.decay_class();
    auto res = nonexistence_certificate(cfg.N, cfg.s, cfg.p, c);
    if (auto* na = std::get_if<NotApplicable>(&res))
        throw InfeasibleError("no certificate: " + na->reason + " (p_* = " +
                              to_string(nonexistence_threshold(cfg.N, cfg.s, c)) + ")");
    const auto& cert = std::get<Certificate>(res);
    out << "class     = " << to_string(c) << "\n";
    out << "regime    = " << to_string(cert.regime) << "\n";
    out << "p         = " << exact(cfg.p) << "  <  p_* = " << exact(nonexistence_threshold(cfg.N, cfg.s, c))
        << "\n";
    out << "step      = " << exact(cert.step) << "\n";
    out << "steps     = " << cert.steps << "\n";
    out << "mu trace:\n";
    for (size_t i = 0; i < cert.mu_trace.size(); ++i)
        out << "  mu_" << i + 1 << " = " << exact(cert.mu_trace[i]) << "\n";
    out << "mu*       = " << exact(cert.terminal_mu_star) << "  in (" << exact(cert.star_lo) << ", "
        << exact(cert.star_hi) << ")\n";
    const Rational prod = cert.terminal_mu_star * cfg.p;
    out << "mu* p     = " << exact(prod) << "  <  N = " << cfg.N << "\n";
    out << "witness: int u^p >= C int w_{mu*}^p = infinity, since w_{mu*}^p ~ |x|^{-" << num(to_double(prod))
        << "} is not integrable at infinity in dimension " << cfg.N << "\n";
}

void cmd_amu(const ExperimentConfig& cfg, std::ostream& out) {
    const double s = to_double(cfg.s);
    out << "mu,A_mu,error,divergent\n";
    for (double mu : cfg.mu) {
        auto r = amu(cfg.N, s, mu);
        out << num(mu) << ',' << (r.divergent ? "inf" : num(r.value)) << ',' << num(r.error_estimate) << ','
            << (r.divergent ? 1 : 0) << '\n';
    }
}

void cmd_fraclap_eval(const ExperimentConfig& cfg, std::ostream& out) {
    const double s = to_double(cfg.s);
    out << "mu,r,value,error,asymptotic\n";
    for (double mu : cfg.mu) {
        for (double r : cfg.radii) {
            auto v = fraclap_w(cfg.N, s, mu, r, cfg.lambda);
            out << num(mu) << ',' << num(r) << ',' << num(v.value) << ',' << num(v.error) << ','
                << (v.asymptotic ? 1 : 0) << '\n';
        }
    }
}

SolveArtifacts cmd_solve(const ExperimentConfig& cfg, std::ostream& out) {
    const ProblemParams params = cfg.params();
    auto report = validate(params, cfg.potential);
    if (!report.admissible()) {
        std::string msg = "inadmissible problem:";
        for (const auto& v : report.violations) msg += " " + v + ";";
        throw ConfigError(msg);
    }
    fs::create_directories(cfg.out_dir);
    SolveArtifacts art;
    const fs::path dir(cfg.out_dir);
    art.trace_path = (dir / "margin_trace.csv").string();
    auto t0 = std::chrono::steady_clock::now();
    try {
        art.solution = solve_original(params, cfg.potential, cfg.solver);
    } catch (const InfeasibleError& e) {
        if (!e.trace.empty()) write_trace(art.trace_path, e.trace);
        throw;
    }
    const auto& sol = art.solution;
    write_trace(art.trace_path, sol.trace);

    CsvRow& row = art.row;
    row.N = params.N;
    row.s = params.s;
    row.p = params.p;
    row.omega = omega_column(cfg.potential);
    row.feasible = true;
    fill_solution(row, sol);
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    art.profile_path = (dir / "profile.txt").string();
    {
        auto f = open_out(art.profile_path);
        f << "# r u\n";
        char buf[64];
        const auto& g = sol.state.profile.grid;
        for (int j = 0; j <= g.M; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", g.r[j], sol.state.profile.u[j]);
            f << buf;
        }
    }

    nlohmann::ordered_json meta;
    meta["N"] = params.N;
    meta["s"] = to_string(cfg.s);
    meta["p"] = to_string(cfg.p);
    meta["potential"] = to_string(cfg.potential.kind);
    meta["omega"] = num(row.omega);
    meta["eps"] = sol.params.eps;
    meta["plan"] = {{"case", to_string(sol.plan.case_tag)}, {"theta", to_string(sol.plan.theta)},
                    {"tau", to_string(sol.plan.tau)},        {"mu", to_string(sol.plan.mu)},
                    {"forced", sol.plan.forced}};
    meta["energy"] = sol.state.energy;
    meta["residual"] = sol.state.residual_norm;
    meta["original_residual"] = sol.original_residual;
    meta["iterations"] = sol.state.iterations;
    meta["tail_exponent"] = sol.state.profile.gamma_tail;
    meta["tail_coefficient"] = sol.state.profile.c_tail;
    meta["margin"] = sol.margin.margin;
    meta["margin_argmax"] = sol.margin.argmax;
    meta["depenalized"] = sol.margin.passes;
    meta["decay"] = {{"gamma_fit", sol.decay.fitted_gamma},
                     {"r_squared", sol.decay.r_squared},
                     {"window", {sol.decay.window.lo, sol.decay.window.hi}},
                     {"verdict", row.verdict},
                     {"prediction", sol.decay.has_prediction ? sol.decay.predicted.describe() : ""}};
    meta["grid"] = {{"M", cfg.solver.M}, {"q", cfg.solver.q}, {"R_max", cfg.solver.R_max}};
    nlohmann::ordered_json trace = nlohmann::ordered_json::array();
    for (const auto& m : sol.trace)
        trace.push_back({{"eps", m.eps}, {"margin", num(m.margin)}, {"converged", m.converged}});
    meta["margin_trace"] = trace;
    art.metadata_path = (dir / "metadata.json").string();
    open_out(art.metadata_path) << meta.dump(2) << "\n";

    if (cfg.csv) {
        art.csv_path = (dir / "decay.csv").string();
        open_out(art.csv_path) << csv_header() << "\n" << format_row(row) << "\n";
    }
    if (cfg.plot) {
        art.plot_path = (dir / "plot_profile.gp").string();
        open_out(art.plot_path) << "set logscale xy\nset xlabel 'r'\nset ylabel 'u'\n"
                                << "plot 'profile.txt' using 1:2 with lines title 'u'\n";
    }
    out << "eps = " << num(sol.params.eps) << ", margin = " << num(sol.margin.margin)
        << ", energy = " << num(sol.state.energy) << ", gamma_fit = " << num(sol.decay.fitted_gamma)
        << ", verdict = " << row.verdict << "\n";
    out << "wrote " << art.profile_path << ", " << art.metadata_path;
    if (!art.csv_path.empty()) out << ", " << art.csv_path;
    out << "\n";
    return art;
}

std::vector<CsvRow> cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
    std::vector<Rational> ps = cfg.sweep_p.empty() ? std::vector<Rational>{cfg.p} : cfg.sweep_p;
    std::vector<std::optional<Rational>> omegas;
    if (cfg.sweep_omega.empty())
        omegas.push_back(std::nullopt);
    else
        for (const auto& w : cfg.sweep_omega) omegas.push_back(w);
    std::vector<double> epss = cfg.sweep_eps.empty() ? std::vector<double>{cfg.eps} : cfg.sweep_eps;

    struct Cell {
        Rational p;
        std::optional<Rational> omega;
        double eps;
    };
    std::vector<Cell> cells;
    for (const auto& p : ps)
        for (const auto& w : omegas)
            for (double e : epss) cells.push_back({p, w, e});

    std::vector<CsvRow> rows(cells.size());
    auto run_cell = [&](size_t k) {
        const Cell& cell = cells[k];
        auto t0 = std::chrono::steady_clock::now();
        ExperimentConfig c = cfg;
        c.p = cell.p;
        if (cell.omega) {
            c.omega = cell.omega;
            c.potential = cfg.potential_with_omega(*cell.omega);
        }
        ProblemParams params = c.params();
        params.eps = cell.eps;
        CsvRow& row = rows[k];
        row.N = params.N;
        row.s = params.s;
        row.p = params.p;
        row.eps = cell.eps;
        row.omega = omega_column(c.potential);
        row.margin = row.energy = row.residual = row.gamma_fit = std::nan("");
        row.gamma_pred_lo = row.gamma_pred_hi = row.r_squared = std::nan("");
        row.theta = row.tau = row.mu = std::nan("");
        const DecayClass cls = c.decay_class();
        try {
            auto sel = select_penalization(c.N, c.s, c.p, cls);
            if (auto* inf = std::get_if<Infeasible>(&sel)) {
                row.feasible = false;
                row.error_class = "infeasible";
                bool cert = std::holds_alternative<Certificate>(nonexistence_certificate(c.N, c.s, c.p, cls));
                row.verdict = cert ? "nonexistence" : inf->open_boundary ? "open_boundary" : "infeasible";
            } else {
                row.feasible = true;
                fill_plan(row, std::get<PenalizationPlan>(sel));
                auto sol = solve_at(params, c.potential, c.solver);
                fill_solution(row, sol);
            }
        } catch (const ConvergenceError&) {
            row.error_class = "convergence";
            row.verdict = "not_converged";
        } catch (const InfeasibleError&) {
            row.feasible = false;
            row.error_class = "infeasible";
            row.verdict = "infeasible";
        } catch (const std::domain_error&) {
            row.feasible = false;
            row.error_class = "infeasible";
            row.verdict = "inadmissible";
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    int jobs = cfg.solver.jobs > 0 ? cfg.solver.jobs : 1;
    jobs = std::min<int>(jobs, static_cast<int>(cells.size()));
    if (jobs <= 1) {
        for (size_t k = 0; k < cells.size(); ++k) run_cell(k);
    } else {
        std::mutex m;
        size_t next = 0;
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                while (true) {
                    size_t k;
                    {
                        std::lock_guard<std::mutex> lock(m);
                        if (next >= cells.size()) return;
                        k = next++;
                    }
                    run_cell(k);
                }
            });
        for (auto& th : pool) th.join();
    }

    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    if (cfg.csv) {
        auto f = open_out(dir / "sweep.csv");
        f << csv_header() << "\n";
        for (const auto& r : rows) f << format_row(r) << "\n";
    }
    if (cfg.plot) {
        open_out(dir / "plot_sweep.gp")
            << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'p'\n"
            << "set ylabel 'fitted tail exponent'\n"
            << "plot 'sweep.csv' using 3:13 with points title 'gamma_fit', "
            << "'' using 3:14 with points title 'predicted'\n";
    }
    out << csv_header() << "\n";
    for (const auto& r : rows) out << format_row(r) << "\n";
    return rows;
}

bool cmd_selftest(const ExperimentConfig& cfg, std::ostream& out) {
    const double s = to_double(cfg.s);
    const auto& st = cfg.solver;
    auto grid = RadialGrid::graded(st.M, st.q, st.R_max);
    auto op = assemble_operator(grid, cfg.N, s, st.jobs);
    bool ok = true;
    for (double mu : {1.0, cfg.N - 2.0 * s, cfg.N + 1.0}) {
        auto t = operator_self_test(*op, mu);
        bool pass = t.max_rel_error <= st.self_test_tol;
        ok = ok && pass;
        out << "operator w_" << num(mu) << ": max rel error " << num(t.max_rel_error) << " at r = "
            << num(t.worst_radius) << (pass ? "  PASS" : "  FAIL") << "\n";
    }
    ProblemParams params = cfg.params();
    try {
        SolverSettings forced = st;
        forced.force_plan = true;
        auto plan = plan_for(params, cfg.potential, forced);
        double gamma = expected_tail_exponent(params.N, params.s, params.p, cfg.potential);
        PenalizedProblem prob(op, params, plan, cfg.potential, gamma);
        auto guess = initial_guess(grid, params, cfg.potential, gamma);
        Eigen::Map<const Eigen::VectorXd> u(guess.u.data(), static_cast<Eigen::Index>(guess.u.size()));
        auto g = gradient_check(prob, u, 10, 1e-5, cfg.seed);
        bool pass = g.max_rel_error <= 1e-5;
        ok = ok && pass;
        out << "gradient check (" << g.directions << " directions, seed " << cfg.seed << "): max rel error "
            << num(g.max_rel_error) << (pass ? "  PASS" : "  FAIL") << "\n";
    } catch (const std::exception& e) {
        ok = false;
        out << "gradient check skipped: " << e.what() << "  FAIL\n";
    }
    return ok;
}

}  // namespace fd
