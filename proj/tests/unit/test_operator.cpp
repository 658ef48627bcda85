#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracdecay/fraclap.hpp"
#include "fracdecay/operator.hpp"

using namespace fd;

namespace {

std::shared_ptr<const RadialOperator> op1() {
    return assemble_operator(RadialGrid::graded(512, 2.0, 1e3), 1, 0.4);
}

}  // namespace

TEST(Grid, GradedNodes) {
    auto g = RadialGrid::graded(64, 2.0, 100.0);
    ASSERT_EQ(g.size(), 65);
    EXPECT_EQ(g.r.front(), 0.0);
    EXPECT_DOUBLE_EQ(g.r.back(), 100.0);
    for (int j = 1; j <= 64; ++j) EXPECT_GT(g.r[j], g.r[j - 1]);
    EXPECT_NEAR(g.at(32.0), 25.0, 1e-12);
    EXPECT_NEAR(g.xi_at(25.0), 32.0, 1e-12);
}

TEST(Profile, TailClosureIsContinuous) {
    RadialProfile p;
    p.grid = RadialGrid::graded(32, 2.0, 50.0);
    p.u.assign(33, 0.0);
    for (int j = 0; j <= 32; ++j) p.u[j] = std::pow(1.0 + p.grid.r[j] * p.grid.r[j], -0.9);
    p.close_tail(1.8);
    EXPECT_NEAR(p.c_tail * std::pow(50.0, -1.8), p.u[32], 1e-15);
    EXPECT_NEAR(p.value(50.0), p.value(50.0 + 1e-9), 1e-12);
    EXPECT_NEAR(p.value(100.0), p.c_tail * std::pow(100.0, -1.8), 1e-15);
    EXPECT_NEAR(p.value(p.grid.r[5]), p.u[5], 1e-15);
}

TEST(Operator, AnnihilatesConstants) {
    auto op = op1();
    Eigen::VectorXd one = Eigen::VectorXd::Ones(op->size());
    Eigen::VectorXd y = op->apply(one, 0.0);
    EXPECT_LT(y.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Operator, Linear) {
    auto op = op1();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    Eigen::VectorXd u(op->size()), v(op->size());
    for (int i = 0; i < op->size(); ++i) u[i] = n(rng), v[i] = n(rng);
    Eigen::VectorXd lhs = op->apply(2.5 * u - 0.75 * v, 1.3);
    Eigen::VectorXd rhs = 2.5 * op->apply(u, 1.3) - 0.75 * op->apply(v, 1.3);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9 * rhs.cwiseAbs().maxCoeff());
}

TEST(Operator, VolumeWeightsPositiveAndExact) {
    auto op = op1();
    auto w = op->volume_weights(1.0);
    EXPECT_GT(w.minCoeff(), 0.0);
    // 1D: |S^0| R = 2 R
    EXPECT_NEAR(w.sum(), 2e3, 1e-9 * 2e3);
    auto op3 = assemble_operator(RadialGrid::graded(64, 2.0, 10.0), 3, 0.5);
    auto w3 = op3->volume_weights(2.0);
    EXPECT_GT(w3.minCoeff(), 0.0);
    EXPECT_NEAR(w3.sum(), 4.0 * M_PI * 1e3 / 3.0, 2e-3 * 4.0 * M_PI * 1e3 / 3.0);
}

TEST(Operator, SelfTestOneDimension) {
    auto op = op1();
    for (double mu : {1.0, 0.2, 2.0}) {
        auto t = operator_self_test(*op, mu);
        EXPECT_LE(t.max_rel_error, 1e-3) << mu << " worst r = " << t.worst_radius;
    }
}

TEST(Operator, MatchesPointwiseOnW2InThreeDimensions) {
    auto op = assemble_operator(RadialGrid::graded(512, 2.0, 1e3), 3, 0.5);
    auto t = operator_self_test(*op, 2.0, 12);
    EXPECT_LE(t.max_rel_error, 1e-3);
    ASSERT_EQ(t.radii.size(), t.oracle.size());
    for (size_t k = 0; k < t.radii.size(); ++k)
        EXPECT_NEAR(t.oracle[k], fraclap_w_pointwise(3, 0.5, 2.0, t.radii[k]), 1e-9 * std::abs(t.oracle[k]));
}

TEST(Operator, CacheReturnsSameInstance) {
    auto a = op1();
    auto b = op1();
    EXPECT_EQ(a.get(), b.get());
}
