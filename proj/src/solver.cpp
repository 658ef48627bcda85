#include "fracdecay/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

namespace fd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Operator self-test results keyed by operator and mu.
void ensure_self_test(const RadialOperator& op, double mu, double tol) {
    static std::mutex m;
    static std::map<std::tuple<const RadialOperator*, double>, double> done;
    auto key = std::make_tuple(&op, mu);
    double err;
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = done.find(key);
        err = it != done.end() ? it->second : -1.0;
    }
    if (err < 0.0) {
        err = operator_self_test(op, mu).max_rel_error;
        std::lock_guard<std::mutex> lock(m);
        done[key] = err;
    }
    if (!(err <= tol))
        throw ConvergenceError("operator self-test failed: relative error " + fmt(err) + " at mu = " +
                                   fmt(mu) + " exceeds " + fmt(tol) + "; use a finer grid (larger M or q)",
                               err);
}

double sup(const Eigen::VectorXd& u) { return u.cwiseMax(0.0).maxCoeff(); }

}  // namespace

PenalizedProblem::PenalizedProblem(std::shared_ptr<const RadialOperator> op, const ProblemParams& params,
                                   const PenalizationPlan& plan, const PotentialSpec& pot, double gamma)
    : op_(std::move(op)), params_(params), pot_(pot), theta_(plan.theta_d()), tau_(plan.tau_d()),
      gamma_(gamma) {
    const auto& r = op_->grid().r;
    const int n = op_->size();
    V_.resize(n);
    P_.resize(n);
    inside_.resize(n);
    for (int j = 0; j < n; ++j) {
        V_[j] = potential(pot_, r[j]);
        inside_[j] = r[j] < pot_.well_radius;
        P_[j] = inside_[j] ? kInf : std::pow(params_.eps, theta_) * std::pow(r[j], -tau_);
    }
    build();
}

void PenalizedProblem::set_gamma(double gamma) {
    gamma_ = gamma;
    build();
}

void PenalizedProblem::build() {
    Eigen::MatrixXd A = op_->matrix(gamma_);
    w_ = op_->volume_weights(gamma_);
    Eigen::MatrixXd DA = w_.asDiagonal() * A;
    DA *= std::pow(params_.eps, 2.0 * params_.s);
    S_ = 0.5 * (DA + DA.transpose());
    S_.diagonal() += w_.cwiseProduct(V_);
    L_ = std::move(DA);
    L_.diagonal() += w_.cwiseProduct(V_);
}

double PenalizedProblem::f(int j, double u) const {
    const double p = params_.p;
    if (u <= 0.0) return 0.0;
    double g = std::pow(u, p - 2.0);
    return (inside_[j] ? g : std::min(g, P_[j])) * u;
}

double PenalizedProblem::fprime(int j, double u) const {
    const double p = params_.p;
    if (u <= 0.0) return 0.0;
    double g = std::pow(u, p - 2.0);
    if (inside_[j] || g < P_[j]) return (p - 1.0) * g;
    return P_[j];
}

double PenalizedProblem::F(int j, double u) const {
    const double p = params_.p;
    if (u <= 0.0) return 0.0;
    if (inside_[j] || std::pow(u, p - 2.0) <= P_[j]) return std::pow(u, p) / p;
    double tc = std::pow(P_[j], 1.0 / (p - 2.0));
    return std::pow(tc, p) / p + 0.5 * P_[j] * (u * u - tc * tc);
}

double PenalizedProblem::energy(const Eigen::VectorXd& u) const {
    double nl = 0.0;
    for (int j = 0; j < size(); ++j) nl += w_[j] * F(j, u[j]);
    return 0.5 * u.dot(S_ * u) - nl;
}

Eigen::VectorXd PenalizedProblem::gradient(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g = S_ * u;
    for (int j = 0; j < size(); ++j) g[j] -= w_[j] * f(j, u[j]);
    return g;
}

Eigen::VectorXd PenalizedProblem::defect(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g = L_ * u;
    for (int j = 0; j < size(); ++j) g[j] -= w_[j] * f(j, u[j]);
    return g;
}

double PenalizedProblem::residual(const Eigen::VectorXd& u) const {
    return defect(u).cwiseQuotient(w_).cwiseAbs().maxCoeff();
}

double PenalizedProblem::original_residual(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g = L_ * u;
    for (int j = 0; j < size(); ++j) g[j] -= w_[j] * std::pow(std::max(u[j], 0.0), params_.p - 1.0);
    return g.cwiseQuotient(w_).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd PenalizedProblem::hessian(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd H = S_;
    for (int j = 0; j < size(); ++j) H(j, j) -= w_[j] * fprime(j, u[j]);
    return H;
}

Eigen::MatrixXd PenalizedProblem::jacobian(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd J = L_;
    for (int j = 0; j < size(); ++j) J(j, j) -= w_[j] * fprime(j, u[j]);
    return J;
}

double PenalizedProblem::nehari(const Eigen::VectorXd& u, double t) const {
    double nl = 0.0;
    for (int j = 0; j < size(); ++j) nl += w_[j] * f(j, t * u[j]) * t * u[j];
    return t * t * u.dot(S_ * u) - nl;
}

PenalizedState penalized_energy_state(const PenalizedProblem& prob, const RadialProfile& profile) {
    Eigen::Map<const Eigen::VectorXd> u(profile.u.data(), static_cast<Eigen::Index>(profile.u.size()));
    PenalizedState st;
    st.profile = profile;
    st.energy = prob.energy(u);
    st.residual_norm = prob.residual(u);
    return st;
}

std::pair<double, Eigen::VectorXd> penalized_energy_and_gradient(const RadialProfile& profile,
                                                                const ProblemParams& params,
                                                                const PenalizationPlan& plan,
                                                                const PotentialSpec& pot) {
    auto op = assemble_operator(profile.grid, params.N, params.s);
    PenalizedProblem prob(op, params, plan, pot, profile.gamma_tail);
    Eigen::Map<const Eigen::VectorXd> u(profile.u.data(), static_cast<Eigen::Index>(profile.u.size()));
    return {prob.energy(u), prob.gradient(u)};
}

DecayClass decay_class_of(const PotentialSpec& pot, double s) {
    switch (pot.kind) {
        case PotentialKind::constant: return DecayClass::slow(0);
        case PotentialKind::logarithmic_decay: return DecayClass::log();
        case PotentialKind::compact_support: return DecayClass::fast();
        case PotentialKind::power_decay:
        case PotentialKind::tabulated_radial: {
            if (!std::isfinite(pot.omega)) return DecayClass::fast();
            Rational w = rational_from_decimal(pot.omega);
            if (w <= 2 * rational_from_decimal(s)) return DecayClass::slow(w);
            return DecayClass::upper_slow(w);
        }
    }
    return DecayClass::fast();
}

double expected_tail_exponent(int N, double s, double p, const PotentialSpec& pot) {
    const DecayClass c = decay_class_of(pot, s);
    const Rational sr = rational_from_decimal(s);
    if (c.tag == DecayTag::log) return N + 2.0 * s;
    if (c.tag == DecayTag::fast || c.omega_infinite || c.omega > 2 * sr) return N - 2.0 * s;
    (void)p;
    return to_double(N + 2 * sr - c.omega);
}

PenalizationPlan plan_for(const ProblemParams& params, const PotentialSpec& pot,
                          const SolverSettings& settings) {
    const Rational s = rational_from_decimal(params.s);
    const Rational p = rational_from_decimal(params.p);
    const DecayClass c = decay_class_of(pot, params.s);
    auto sel = select_penalization(params.N, s, p, c);
    if (auto* plan = std::get_if<PenalizationPlan>(&sel)) return *plan;
    const auto& inf = std::get<Infeasible>(sel);
    if (settings.force_plan && p < critical_exponent(params.N, s) && p > 2)
        return forced_plan(params.N, s, p, c);
    throw InfeasibleError("infeasible plan for " + to_string(c) + ": " + inf.reason);
}

RadialProfile initial_guess(const RadialGrid& grid, const ProblemParams& params, const PotentialSpec& pot,
                            double gamma) {
    RadialProfile prof;
    prof.grid = grid;
    double V0 = std::max(potential(pot, 0.0), 1e-12);
    double amp = std::pow(V0, 1.0 / (params.p - 2.0));
    double width = params.eps * std::pow(V0, -0.5 / params.s);
    prof.u.resize(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        double x = grid.r[j] / width;
        prof.u[j] = amp * std::exp(-0.5 * x * x);
    }
    prof.close_tail(gamma);
    return prof;
}

GradientCheck gradient_check(const PenalizedProblem& prob, const Eigen::VectorXd& u, int directions,
                             double h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    GradientCheck out;
    const Eigen::VectorXd g = prob.gradient(u);
    const double scale = std::max(sup(u), 1e-300);
    for (int d = 0; d < directions; ++d) {
        Eigen::VectorXd phi(u.size());
        for (auto& x : phi) x = scale * normal(rng);
        double fd = (prob.energy(u + h * phi) - prob.energy(u - h * phi)) / (2.0 * h);
        double an = g.dot(phi);
        double rel = std::abs(fd - an) / std::max(std::abs(an), 1e-300);
        out.max_rel_error = std::max(out.max_rel_error, rel);
        ++out.directions;
    }
    return out;
}

namespace {

double refit_gamma(const Eigen::VectorXd& u, const RadialGrid& grid) {
    std::vector<double> r, v;
    for (int j = 0; j <= grid.M; ++j) {
        if (grid.r[j] >= 0.25 * grid.R_max && grid.r[j] <= 0.5 * grid.R_max && u[j] > 0.0) {
            r.push_back(grid.r[j]);
            v.push_back(u[j]);
        }
    }
    auto rep = fit_power_law(r, v);
    if (rep.samples < 3 || !std::isfinite(rep.fitted_gamma)) return -1.0;
    return std::max(rep.fitted_gamma, 1e-3);
}

// u <- t u with <J'(tu), tu> = 0
void nehari_rescale(const PenalizedProblem& prob, Eigen::VectorXd& u) {
    if (!(prob.nehari(u, 1.0) != 0.0)) return;
    double lo = 1.0, hi = 1.0;
    if (prob.nehari(u, 1.0) > 0.0) {
        while (prob.nehari(u, hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e12) return;
        }
    } else {
        while (prob.nehari(u, lo) <= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-12) return;
        }
    }
    for (int k = 0; k < 60; ++k) {
        double mid = 0.5 * (lo + hi);
        (prob.nehari(u, mid) > 0.0 ? lo : hi) = mid;
    }
    u *= 0.5 * (lo + hi);
}

}  // namespace

PenalizedState solve_penalized(const ProblemParams& params, const PenalizationPlan& plan,
                               const PotentialSpec& pot, const SolverSettings& st,
                               std::optional<double> initial_gamma) {
    const RadialGrid grid = RadialGrid::graded(st.M, st.q, st.R_max);
    auto op = assemble_operator(grid, params.N, params.s, st.jobs);
    if (st.self_test) ensure_self_test(*op, plan.mu_d(), st.self_test_tol);

    double gamma = initial_gamma ? *initial_gamma : expected_tail_exponent(params.N, params.s, params.p, pot);
    RadialProfile prof = initial_guess(grid, params, pot, gamma);
    PenalizedProblem prob(op, params, plan, pot, gamma);
    Eigen::VectorXd u = Eigen::Map<Eigen::VectorXd>(prof.u.data(), grid.size());
    const double amp0 = sup(u);
    auto collapsed = [&](const Eigen::VectorXd& v) { return !(sup(v) > 1e-8 * amp0); };

    // semi-implicit sweeps: u <- m^{(p-1)/(p-2)} L^{-1} w f(u), m = u.Lu / u.w f(u)
    const double alpha = (params.p - 1.0) / (params.p - 2.0);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(prob.collocation());
    int it = 0;
    for (; it < st.max_iter; ++it) {
        if (it > 0 && it % st.refit_every == 0) {
            double g = refit_gamma(u, grid);
            if (g > 0.0 && std::abs(g - prob.gamma()) > 1e-4) {
                prob.set_gamma(g);
                lu.compute(prob.collocation());
            }
            nehari_rescale(prob, u);
        }
        Eigen::VectorXd nf(u.size());
        for (int j = 0; j < u.size(); ++j) nf[j] = prob.weights()[j] * prob.f(j, u[j]);
        double den = u.dot(nf);
        if (!(den > 0.0) || collapsed(u))
            throw ConvergenceError("collapsed to trivial state; adjust initial amplitude", sup(u));
        double m = u.dot(prob.quadratic() * u) / den;
        Eigen::VectorXd next = std::pow(m, alpha) * lu.solve(nf);
        next = next.cwiseMax(0.0);
        double change = (next - u).cwiseAbs().maxCoeff() / sup(next);
        u = next;
        if (change < 1e-9) break;
        if (change < 1e-4 && prob.residual(u) <= 1e-2 * sup(u)) break;
    }
    if (collapsed(u)) throw ConvergenceError("collapsed to trivial state; adjust initial amplitude", sup(u));

    // Newton polish, alternated with tail re-fits
    double res = prob.residual(u);
    for (int outer = 0; outer <= st.outer_max; ++outer) {
        for (int k = 0; k < st.newton_max && res > st.tol * sup(u); ++k, ++it) {
            Eigen::VectorXd step = prob.jacobian(u).partialPivLu().solve(-prob.defect(u));
            double t = 1.0;
            Eigen::VectorXd trial;
            double r_trial = kInf;
            for (int b = 0; b < 12; ++b, t *= 0.5) {
                trial = (u + t * step).cwiseMax(0.0);
                r_trial = prob.residual(trial);
                if (r_trial < res) break;
            }
            if (!(r_trial < res)) break;
            u = trial;
            res = r_trial;
        }
        if (collapsed(u)) throw ConvergenceError("collapsed to trivial state; adjust initial amplitude", res);
        double g = refit_gamma(u, grid);
        if (!(g > 0.0) || std::abs(g - prob.gamma()) < 1e-4) break;
        prob.set_gamma(g);
        res = prob.residual(u);
    }
    if (!(res <= st.tol * sup(u)))
        throw ConvergenceError("iteration cap reached: residual " + fmt(res) + " > " + fmt(st.tol) +
                                   " * sup u = " + fmt(st.tol * sup(u)),
                               res);

    PenalizedState out;
    out.profile.grid = grid;
    out.profile.u.assign(u.data(), u.data() + u.size());
    out.profile.close_tail(prob.gamma());
    out.energy = prob.energy(u);
    out.residual_norm = res;
    out.iterations = it;
    return out;
}

MarginReport depenalization_check(const PenalizedState& state, const ProblemParams& params,
                                  const PenalizationPlan& plan, const PotentialSpec& pot) {
    MarginReport rep;
    const auto& prof = state.profile;
    const auto& r = prof.grid.r;
    const double p = params.p, tau = plan.tau_d(), scale = std::pow(params.eps, -plan.theta_d());
    for (size_t j = 0; j < prof.u.size(); ++j) {
        if (r[j] < pot.well_radius) continue;
        double u = std::max(prof.u[j], 0.0);
        double m = u == 0.0 ? 0.0 : std::pow(u, p - 2.0) * std::pow(r[j], tau) * scale;
        if (m > rep.margin) {
            rep.margin = m;
            rep.argmax = r[j];
        }
    }
    // closure c r^{-gamma} past R_max
    if (prof.u.back() > 0.0 && tau > prof.gamma_tail * (p - 2.0)) {
        rep.margin = kInf;
        rep.argmax = kInf;
    }
    rep.passes = rep.margin < 1.0;
    return rep;
}

OriginalSolution solve_at(const ProblemParams& params, const PotentialSpec& pot, const SolverSettings& st) {
    OriginalSolution sol;
    sol.params = params;
    sol.plan = plan_for(params, pot, st);
    sol.state = solve_penalized(params, sol.plan, pot, st);
    sol.margin = depenalization_check(sol.state, params, sol.plan, pot);

    auto op = assemble_operator(sol.state.profile.grid, params.N, params.s, st.jobs);
    PenalizedProblem prob(op, params, sol.plan, pot, sol.state.profile.gamma_tail);
    Eigen::Map<const Eigen::VectorXd> u(sol.state.profile.u.data(),
                                        static_cast<Eigen::Index>(sol.state.profile.u.size()));
    sol.original_residual = prob.original_residual(u);

    sol.decay = fit_tail(sol.state.profile, default_window(pot.well_radius, st.R_max));
    try {
        const DecayClass c = decay_class_of(pot, params.s);
        if (c.tag != DecayTag::log) {
            std::optional<Rational> omega;
            if (!(c.tag == DecayTag::fast || c.omega_infinite)) omega = c.omega;
            sol.decay.predicted =
                predict_decay(params.N, rational_from_decimal(params.s), rational_from_decimal(params.p), omega);
            sol.decay.has_prediction = true;
            sol.decay.verdict = compare_regimes(sol.decay);
        }
    } catch (const std::domain_error&) {
        sol.decay.has_prediction = false;
    }
    return sol;
}

OriginalSolution solve_original(const ProblemParams& params, const PotentialSpec& pot,
                                const SolverSettings& st) {
    if (!(st.eps_min > 0.0 && st.eps_max >= st.eps_min)) throw std::domain_error("bad eps range");
    plan_for(params, pot, st);  // infeasible plans fail before any solve
    std::vector<MarginSample> trace;
    std::optional<OriginalSolution> best;

    auto attempt = [&](double eps) -> bool {
        ProblemParams pe = params;
        pe.eps = eps;
        MarginSample smp;
        smp.eps = eps;
        try {
            OriginalSolution sol = solve_at(pe, pot, st);
            smp.margin = sol.margin.margin;
            smp.converged = true;
            trace.push_back(smp);
            if (sol.margin.passes) {
                if (!best || eps > best->params.eps) best = std::move(sol);
                return true;
            }
            return false;
        } catch (const ConvergenceError& e) {
            smp.margin = std::numeric_limits<double>::quiet_NaN();
            smp.note = e.what();
            trace.push_back(smp);
            return false;
        }
    };

    const int n = std::max(st.eps_scan, 1);
    double fail = -1.0, pass = -1.0;
    for (int k = 0; k < n; ++k) {
        double eps = n == 1 ? st.eps_max : st.eps_max * std::pow(st.eps_min / st.eps_max, double(k) / (n - 1));
        if (attempt(eps)) {
            pass = eps;
            break;
        }
        fail = eps;
    }
    if (pass > 0.0 && fail > 0.0) {
        for (int b = 0; b < st.bisect_steps; ++b) {
            double mid = std::sqrt(fail * pass);
            (attempt(mid) ? pass : fail) = mid;
        }
    }
    if (!best) {
        std::ostringstream os;
        os << "no eps in [" << st.eps_min << ", " << st.eps_max << "] passes the de-penalization check; margins:";
        for (const auto& m : trace) os << " eps=" << m.eps << ":" << (m.converged ? fmt(m.margin) : "n/c");
        throw InfeasibleError(os.str(), trace);
    }
    best->trace = trace;
    return *best;
}

}  // namespace fd
