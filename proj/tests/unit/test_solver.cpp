#include <gtest/gtest.h>

#include <cmath>

#include "fracdecay/solver.hpp"

using namespace fd;

namespace {

const ProblemParams kParams{1, 0.4, 3.0, 0.2};

PenalizationPlan plan_of(const ProblemParams& p, const PotentialSpec& pot) {
    return plan_for(p, pot, SolverSettings{});
}

const PenalizedState& bump() {
    static const PenalizedState st = [] {
        auto pot = PotentialSpec::constant_well(0.5);
        return solve_penalized(kParams, plan_of(kParams, pot), pot);
    }();
    return st;
}

}  // namespace

TEST(Energy, ZeroState) {
    auto pot = PotentialSpec::constant_well(0.5);
    RadialProfile z;
    z.grid = RadialGrid::graded(512, 2.0, 1e3);
    z.u.assign(513, 0.0);
    auto [J, g] = penalized_energy_and_gradient(z, kParams, plan_of(kParams, pot), pot);
    EXPECT_EQ(J, 0.0);
    EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Energy, GradientMatchesFiniteDifferences) {
    for (auto pot : {PotentialSpec::constant_well(0.5), PotentialSpec::power_well(0.4, 0.5)}) {
        auto grid = RadialGrid::graded(512, 2.0, 1e3);
        auto op = assemble_operator(grid, 1, 0.4);
        auto plan = plan_of(kParams, pot);
        double gamma = expected_tail_exponent(1, 0.4, 3.0, pot);
        PenalizedProblem prob(op, kParams, plan, pot, gamma);
        auto guess = initial_guess(grid, kParams, pot, gamma);
        Eigen::Map<const Eigen::VectorXd> u(guess.u.data(), static_cast<Eigen::Index>(guess.u.size()));
        auto g = gradient_check(prob, u, 10, 1e-5, 42);
        EXPECT_EQ(g.directions, 10);
        EXPECT_LE(g.max_rel_error, 1e-5);
    }
}

TEST(Energy, MountainPassGeometryNearZero) {
    auto pot = PotentialSpec::constant_well(0.5);
    auto grid = RadialGrid::graded(512, 2.0, 1e3);
    auto op = assemble_operator(grid, 1, 0.4);
    PenalizedProblem prob(op, kParams, plan_of(kParams, pot), pot, 1.8);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(grid.size());
    for (int j = 0; j < grid.size(); ++j)
        if (grid.r[j] < 1.0) u[j] = 1.0 - grid.r[j];
    for (double t : {1e-3, 1e-2, 1e-1}) EXPECT_GT(prob.energy(t * u), 0.0) << t;
}

TEST(Energy, QuadraticFormSymmetric) {
    auto pot = PotentialSpec::constant_well(0.5);
    auto op = assemble_operator(RadialGrid::graded(512, 2.0, 1e3), 1, 0.4);
    PenalizedProblem prob(op, kParams, plan_of(kParams, pot), pot, 1.8);
    const auto& Q = prob.quadratic();
    EXPECT_LT((Q - Q.transpose()).cwiseAbs().maxCoeff(), 1e-12 * Q.cwiseAbs().maxCoeff());
    EXPECT_GT(prob.weights().minCoeff(), 0.0);
}

TEST(Penalized, PositiveBumpMonotoneTail) {
    const auto& st = bump();
    const auto& g = st.profile.grid;
    EXPECT_LE(st.residual_norm, 1e-6 * *std::max_element(st.profile.u.begin(), st.profile.u.end()));
    EXPECT_TRUE(std::isfinite(st.energy));
    EXPECT_GT(st.energy, 0.0);
    for (int j = 0; j <= g.M; ++j) {
        EXPECT_GT(st.profile.u[j], 0.0);
        if (j > 0 && g.r[j - 1] >= 2.0) EXPECT_LE(st.profile.u[j], st.profile.u[j - 1]);
    }
    EXPECT_EQ(std::max_element(st.profile.u.begin(), st.profile.u.end()) - st.profile.u.begin(), 0);
    EXPECT_GT(st.profile.gamma_tail, 0.0);
    EXPECT_NEAR(st.profile.c_tail * std::pow(g.R_max, -st.profile.gamma_tail), st.profile.u[g.M], 1e-14);
}

TEST(Penalized, RejectsInfeasiblePlan) {
    ProblemParams p{1, 0.4, 2.1, 0.1};
    auto pot = PotentialSpec::power_well(0.4, 0.5);
    EXPECT_THROW(plan_for(p, pot, SolverSettings{}), InfeasibleError);
    SolverSettings forced;
    forced.force_plan = true;
    EXPECT_TRUE(plan_for(p, pot, forced).forced);
}

TEST(Penalized, IterationCapReported) {
    auto pot = PotentialSpec::constant_well(0.5);
    SolverSettings st;
    st.max_iter = 1;
    st.newton_max = 0;
    st.outer_max = 0;
    try {
        solve_penalized(kParams, plan_of(kParams, pot), pot, st);
        FAIL() << "expected a convergence error";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual, 0.0);
    }
}

TEST(Depenalization, ZeroStateIsVacuous) {
    auto pot = PotentialSpec::constant_well(0.5);
    PenalizedState z;
    z.profile.grid = RadialGrid::graded(64, 2.0, 1e3);
    z.profile.u.assign(65, 0.0);
    z.profile.close_tail(1.8);
    auto m = depenalization_check(z, kParams, plan_of(kParams, pot), pot);
    EXPECT_EQ(m.margin, 0.0);
    EXPECT_TRUE(m.passes);
}

TEST(Depenalization, MarginMatchesDefinition) {
    const auto& st = bump();
    auto pot = PotentialSpec::constant_well(0.5);
    auto plan = plan_of(kParams, pot);
    auto m = depenalization_check(st, kParams, plan, pot);
    double expect = 0.0;
    const auto& g = st.profile.grid;
    for (int j = 0; j <= g.M; ++j)
        if (g.r[j] >= pot.well_radius)
            expect = std::max(expect, std::pow(st.profile.u[j], kParams.p - 2.0) * std::pow(g.r[j], plan.tau_d()) /
                                          std::pow(kParams.eps, plan.theta_d()));
    EXPECT_NEAR(m.margin, expect, 1e-12 * expect);
    EXPECT_EQ(m.passes, m.margin < 1.0);
}

TEST(Original, SolutionPropertiesAtOmegaZero) {
    auto pot = PotentialSpec::constant_well(0.5);
    auto sol = solve_original({1, 0.4, 3.0, 0.1}, pot);
    EXPECT_LT(sol.margin.margin, 1.0);
    EXPECT_TRUE(sol.margin.passes);
    EXPECT_FALSE(sol.trace.empty());
    EXPECT_LE(sol.original_residual, 2.0 * sol.state.residual_norm);
    EXPECT_NEAR(sol.decay.fitted_gamma, 1.8, 0.15);
    // lower-bound conformance on [R_L, R_max/2]
    auto lb = verify_lower_bound(sol.state.profile, sol.decay.predicted, {1.0, 500.0}, 1, 0.4);
    ASSERT_FALSE(lb.empty());
    for (const auto& l : lb) EXPECT_GT(l.c, 0.0);
}

TEST(Original, SupNormBoundedAcrossEps) {
    auto pot = PotentialSpec::constant_well(0.5);
    double lo = 1e300, hi = 0.0;
    for (double e : {0.4, 0.2, 0.1}) {
        ProblemParams p = kParams;
        p.eps = e;
        auto st = solve_penalized(p, plan_of(p, pot), pot);
        double m = *std::max_element(st.profile.u.begin(), st.profile.u.end());
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    EXPECT_LT(hi / lo, 2.0);
}

TEST(Classes, DecayClassOfPotentials) {
    EXPECT_EQ(decay_class_of(PotentialSpec::constant_well(0.5), 0.4).tag, DecayTag::slow);
    EXPECT_EQ(decay_class_of(PotentialSpec::power_well(0.4, 0.5), 0.4).tag, DecayTag::slow);
    EXPECT_EQ(decay_class_of(PotentialSpec::power_well(1.5, 0.5), 0.4).tag, DecayTag::upper_slow);
    EXPECT_EQ(decay_class_of(PotentialSpec::log_well(0.5), 0.4).tag, DecayTag::log);
    EXPECT_EQ(decay_class_of(PotentialSpec::compact_well(0.5, 4.0), 0.4).tag, DecayTag::fast);
}
