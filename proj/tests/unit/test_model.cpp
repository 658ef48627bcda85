#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "fracdecay/model.hpp"

using namespace fd;

namespace {

bool has(const ValidationReport& r, const std::string& needle) {
    for (const auto& v : r.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Validate, AdmissibleConstant) {
    auto r = validate({3, 0.5, 2.5, 0.1}, PotentialSpec::constant_well(0.5));
    EXPECT_TRUE(r.admissible());
}

TEST(Validate, FlatPotentialOnlyMissesTheWell) {
    auto r = validate({3, 0.5, 2.5, 0.1}, PotentialSpec::constant_well(0.0));
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_TRUE(has(r, "condition (V) fails"));
}

TEST(Validate, DimensionTooSmall) {
    auto r = validate({1, 0.6, 3.0, 0.1}, PotentialSpec::constant_well(0.5));
    EXPECT_TRUE(has(r, "N > 2s fails"));
}

TEST(Validate, AboveCritical) {
    auto r = validate({3, 0.5, 3.2, 0.1}, PotentialSpec::constant_well(0.5));
    ASSERT_FALSE(r.admissible());
    EXPECT_TRUE(has(r, "p < 2_s^* = 3 fails"));
}

TEST(Validate, ReportsEveryViolation) {
    auto r = validate({3, 0.5, 1.5, -1.0}, PotentialSpec::constant_well(0.5));
    EXPECT_TRUE(has(r, "p > 2 fails"));
    EXPECT_TRUE(has(r, "eps > 0 fails"));
}

TEST(Validate, PureAndIdempotent) {
    ProblemParams p{1, 0.6, 3.0, 0.0};
    auto pot = PotentialSpec::power_well(1.0, 0.5);
    auto a = validate(p, pot);
    auto b = validate(p, pot);
    EXPECT_EQ(a.violations, b.violations);
}

TEST(Potential, Constant) {
    PotentialSpec pot;
    pot.kind = PotentialKind::constant;
    EXPECT_DOUBLE_EQ(potential(pot, 7.0), 1.0);
}

TEST(Potential, PowerDecayAtOriginAndInfinity) {
    auto pot = PotentialSpec::power_well(1.0, 0.0);
    EXPECT_DOUBLE_EQ(potential(pot, 0.0), 1.0);
    EXPECT_NEAR(potential(pot, 1e8) * 1e8, 1.0, 1e-12);
}

TEST(Potential, WellFamilyClosedForm) {
    auto pot = PotentialSpec::power_well(0.5, 1.5);
    for (double r : {0.0, 0.3, 0.9, 1.0, 2.0, 50.0}) {
        double expect = (1.0 + 1.5 * std::min(r * r, 1.0)) * std::pow(1.0 + r * r, -0.25);
        EXPECT_NEAR(potential(pot, r), expect, 1e-14 * expect) << r;
    }
}

TEST(Potential, DecayBoundsHoldOnSamples) {
    for (double w : {0.2, 0.8, 1.5}) {
        auto pot = PotentialSpec::power_well(w, 1.0);
        auto [lo, hi] = derive_decay_bounds(pot);
        ASSERT_GT(lo, 0.0);
        for (double r = pot.well_radius; r < 1e7; r *= 1.37) {
            double x = potential(pot, r) * (1.0 + std::pow(r, w));
            EXPECT_GE(x, lo * (1 - 1e-12)) << r;
            EXPECT_LE(x, hi * (1 + 1e-12)) << r;
        }
    }
}

TEST(Potential, CompactSupportVanishesPastCutoff) {
    auto pot = PotentialSpec::compact_well(0.5, 4.0);
    EXPECT_GT(potential(pot, 3.0), 0.0);
    EXPECT_EQ(potential(pot, 4.0), 0.0);
    EXPECT_EQ(potential(pot, 100.0), 0.0);
    // continuous through the cutoff ramp
    double prev = potential(pot, 3.5);
    for (double r = 3.5; r <= 4.0; r += 1e-4) {
        double v = potential(pot, r);
        EXPECT_LT(std::abs(v - prev), 1e-2);
        prev = v;
    }
}

TEST(Potential, TabulatedExtrapolationIsFlagged) {
    PotentialSpec pot;
    pot.kind = PotentialKind::tabulated_radial;
    pot.omega = 1.0;
    pot.table_r = {0.0, 1.0, 2.0};
    pot.table_v = {1.0, 2.0, 1.0};
    auto in = eval_potential(pot, 1.5);
    EXPECT_FALSE(in.extrapolated);
    EXPECT_NEAR(in.value, 1.5, 1e-14);
    auto out = eval_potential(pot, 4.0);
    EXPECT_TRUE(out.extrapolated);
    EXPECT_NEAR(out.value, 0.5, 1e-14);
}

TEST(ConditionV, ConstantFails) {
    auto pot = PotentialSpec::constant_well(0.0);
    EXPECT_FALSE(verify_condition_V(pot, 64).holds);
}

TEST(ConditionV, WellFamilyHolds) {
    auto pot = PotentialSpec::power_well(0.5, 1.5);
    auto c = verify_condition_V(pot, 64);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.v0, 1.0, 1e-14);
    EXPECT_EQ(c.argmin, 0.0);
    EXPECT_NEAR(c.boundary, 2.5 / std::pow(2.0, 0.25), 1e-12);
}

TEST(ConditionV, WitnessTracksWellMinimum) {
    PotentialSpec pot;
    pot.kind = PotentialKind::constant;
    pot.well_radius = 1.0;
    pot.well_profile = [](double r) { return 1.0 + (r - 0.5) * (r - 0.5); };
    auto c = verify_condition_V(pot, 1000);
    EXPECT_TRUE(c.holds);
    // dense sampling oracle
    double best = 1e300, arg = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double r = i * 1e-5;
        double v = pot.well_profile(r);
        if (v < best) best = v, arg = r;
    }
    EXPECT_NEAR(c.argmin, arg, 2e-3);
    EXPECT_NEAR(c.v0, best, 1e-5);
}

TEST(ConditionV, MonotoneInSampleCount) {
    for (double w : {0.0, 0.5, 1.0, 3.0}) {
        auto pot = PotentialSpec::power_well(w, std::pow(2.0, w / 2) - 1 + 0.1);
        for (int k = 16; k <= 1024; k *= 2)
            if (verify_condition_V(pot, k).holds) EXPECT_TRUE(verify_condition_V(pot, 2 * k).holds) << w << " " << k;
    }
}

TEST(ConditionV, NonFiniteThrows) {
    PotentialSpec pot;
    pot.well_profile = [](double r) { return r < 0.5 ? std::nan("") : 1.0; };
    EXPECT_THROW(verify_condition_V(pot, 64), std::exception);
}

TEST(ConditionV, RejectsTooFewSamples) {
    EXPECT_THROW(verify_condition_V(PotentialSpec::power_well(0.5, 1.0), 8), std::exception);
}
