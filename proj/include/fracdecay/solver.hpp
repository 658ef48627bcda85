#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decay.hpp"
#include "exponents.hpp"
#include "model.hpp"
#include "operator.hpp"

namespace fd {

struct SolverSettings {
    int M = 512;
    double q = 2.0;
    double R_max = 1e3;
    double tol = 1e-6;          ///< residual target relative to sup u
    int max_iter = 400;         ///< fixed-point sweeps
    int newton_max = 30;
    int refit_every = 25;
    int outer_max = 8;          ///< tail re-fit rounds after the first convergence
    double eps_min = 0.002;
    double eps_max = 0.4;
    int eps_scan = 4;
    int bisect_steps = 3;
    bool self_test = true;
    double self_test_tol = 1e-3;
    bool force_plan = false;    ///< below the threshold, run the forced plan instead of failing
    int jobs = 0;
};

/// Convergence failure (iteration cap, collapse).
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

struct MarginSample {
    double eps = 0.0;
    double margin = 0.0;
    bool converged = false;
    std::string note;
};

/// No eps passes, or the plan is infeasible.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, std::vector<MarginSample> trace = {})
        : std::runtime_error(what), trace(std::move(trace)) {}
    std::vector<MarginSample> trace;
};

struct PenalizedState {
    RadialProfile profile;
    double energy = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Discrete penalized functional on a fixed grid and tail exponent.
///   J(u) = eps^{2s}/2 u.S u + 1/2 sum w V u^2 - sum w F(r, u)
/// with S the weight-symmetrized operator matrix and w the radial volume weights.
/// The solver zeroes the collocation defect eps^{2s} A u + V u - f(u) instead of
/// gradient / w; the two differ only through the asymmetry of diag(w) A, which
/// sits mostly in the tail column of node M.
class PenalizedProblem {
public:
    PenalizedProblem(std::shared_ptr<const RadialOperator> op, const ProblemParams& params,
                     const PenalizationPlan& plan, const PotentialSpec& pot, double gamma);

    double gamma() const { return gamma_; }
    void set_gamma(double gamma);
    int size() const { return static_cast<int>(w_.size()); }
    const Eigen::VectorXd& weights() const { return w_; }
    const Eigen::VectorXd& potential_values() const { return V_; }
    const Eigen::MatrixXd& quadratic() const { return S_; }  ///< eps^{2s} S + diag(w V)
    const Eigen::MatrixXd& collocation() const { return L_; }  ///< diag(w) (eps^{2s} A + V)

    double f(int j, double u) const;       ///< nonlinearity
    double fprime(int j, double u) const;
    double F(int j, double u) const;       ///< primitive

    double energy(const Eigen::VectorXd& u) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
    /// diag(w) (eps^{2s} A u + V u - f(u))
    Eigen::VectorXd defect(const Eigen::VectorXd& u) const;
    /// sup_j |defect_j / w_j|
    double residual(const Eigen::VectorXd& u) const;
    /// Same with the true nonlinearity u_+^{p-1} everywhere.
    double original_residual(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const;  ///< of defect
    /// <J'(t u), t u>
    double nehari(const Eigen::VectorXd& u, double t) const;

private:
    void build();

    std::shared_ptr<const RadialOperator> op_;
    ProblemParams params_;
    PotentialSpec pot_;
    double theta_, tau_;
    double gamma_;
    Eigen::VectorXd w_, V_, P_;
    std::vector<bool> inside_;
    Eigen::MatrixXd S_, L_;
};

struct GradientCheck {
    double max_rel_error = 0.0;
    int directions = 0;
};

/// Central differences (J(u+h phi) - J(u-h phi)) / 2h against <gradient, phi> for
/// Gaussian random directions phi scaled by sup u.
GradientCheck gradient_check(const PenalizedProblem& prob, const Eigen::VectorXd& u, int directions,
                             double h, std::uint64_t seed);

/// Gaussian bump of amplitude V(0)^{1/(p-2)} and width eps V(0)^{-1/(2s)}.
RadialProfile initial_guess(const RadialGrid& grid, const ProblemParams& params, const PotentialSpec& pot,
                            double gamma);

PenalizedState penalized_energy_state(const PenalizedProblem& prob, const RadialProfile& profile);

std::pair<double, Eigen::VectorXd> penalized_energy_and_gradient(const RadialProfile& profile,
                                                                const ProblemParams& params,
                                                                const PenalizationPlan& plan,
                                                                const PotentialSpec& pot);

PenalizedState solve_penalized(const ProblemParams& params, const PenalizationPlan& plan,
                               const PotentialSpec& pot, const SolverSettings& settings = {},
                               std::optional<double> initial_gamma = std::nullopt);

struct MarginReport {
    double margin = 0.0;
    double argmax = 0.0;
    bool passes = false;
};

MarginReport depenalization_check(const PenalizedState& state, const ProblemParams& params,
                                  const PenalizationPlan& plan, const PotentialSpec& pot);

/// Decay class implied by the potential family.
DecayClass decay_class_of(const PotentialSpec& pot, double s);

/// Tail exponent used to close the grid before the first re-fit.
double expected_tail_exponent(int N, double s, double p, const PotentialSpec& pot);

struct OriginalSolution {
    PenalizedState state;
    ProblemParams params;  ///< eps of the returned solution
    PenalizationPlan plan;
    MarginReport margin;
    DecayReport decay;
    std::vector<MarginSample> trace;
    double original_residual = 0.0;
};

/// Scans eps geometrically from eps_max down to eps_min and bisects between the
/// last failing and the first passing value.  params.eps is ignored.
OriginalSolution solve_original(const ProblemParams& params, const PotentialSpec& pot,
                                const SolverSettings& settings = {});

/// Solution and margin at one eps (no scan).
OriginalSolution solve_at(const ProblemParams& params, const PotentialSpec& pot,
                          const SolverSettings& settings = {});

/// Plan for (params, pot): select_penalization, or the forced plan when
/// settings.force_plan is set and p is at or below the threshold.
PenalizationPlan plan_for(const ProblemParams& params, const PotentialSpec& pot,
                          const SolverSettings& settings);

}  // namespace fd
