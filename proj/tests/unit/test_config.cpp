#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fracdecay/config.hpp"

using namespace fd;

TEST(Config, Defaults) {
    auto c = parse_config("");
    EXPECT_EQ(c.N, 1);
    EXPECT_EQ(c.s, Rational(2, 5));
    EXPECT_EQ(c.p, Rational(3));
    EXPECT_EQ(c.solver.M, 512);
    EXPECT_EQ(c.seed, 1u);
}

TEST(Config, Sections) {
    auto c = parse_config(
        "seed = 9\n[params]\nN = 3\ns = 1/2\np = 0.12e1\neps=0.05\n"
        "[potential]\nkind = power-decay\nomega = 2/5\ndelta = 0.7\n"
        "[solver]\nM = 256\ntol = 1e-7\nforce_plan = yes\n"
        "[sweep]\np = 2.2:2.8:4\neps = 0.1,0.05\n[output]\ndir = x\ncsv = false\nplot = on\n");
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.N, 3);
    EXPECT_EQ(c.p, Rational(6, 5));
    EXPECT_EQ(c.potential.kind, PotentialKind::power_decay);
    EXPECT_EQ(*c.omega, Rational(2, 5));
    EXPECT_DOUBLE_EQ(c.potential.delta, 0.7);
    EXPECT_EQ(c.solver.M, 256);
    EXPECT_TRUE(c.solver.force_plan);
    ASSERT_EQ(c.sweep_p.size(), 4u);
    EXPECT_EQ(c.sweep_p[1], Rational(12, 5));
    EXPECT_EQ(c.sweep_eps.size(), 2u);
    EXPECT_EQ(c.out_dir, "x");
    EXPECT_FALSE(c.csv);
    EXPECT_TRUE(c.plot);
    EXPECT_EQ(c.decay_class().tag, DecayTag::slow);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config("[params]\nbogus = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[solver]\ntol = -1\n"), ConfigError);
    EXPECT_THROW(parse_config("[solver]\nM = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("[sweep]\np = 1:2:0\n"), ConfigError);
    EXPECT_THROW(parse_config("[potential]\nkind = tabulated-radial\n"), ConfigError);
    EXPECT_THROW(parse_config("[potential]\nkind = tabulated-radial\ntable = /nonexistent\n"), ConfigError);
    EXPECT_THROW(parse_config("[sweep]\nomega = 0,1\n"), ConfigError);
    EXPECT_THROW(parse_config("[params\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent.ini"), ConfigError);
}

TEST(Config, TableRelativeToConfig) {
    auto dir = std::filesystem::temp_directory_path() / "fd_cfg_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "v.txt") << "# r V\n0 1\n1 2\n2 1.5\n";
    std::ofstream(dir / "c.ini") << "[potential]\nkind = tabulated-radial\ntable = v.txt\nomega = 1\n";
    auto c = load_config((dir / "c.ini").string());
    EXPECT_EQ(c.potential.table_r.size(), 3u);
    EXPECT_DOUBLE_EQ(potential(c.potential, 3.0), 1.0);
}

TEST(Config, UpperSlowAboveTwoS) {
    auto c = parse_config("[potential]\nkind = power-decay\nomega = 1\n");
    EXPECT_EQ(c.decay_class().tag, DecayTag::upper_slow);
    auto w = c.potential_with_omega(Rational(1, 5));
    EXPECT_DOUBLE_EQ(w.omega, 0.2);
}

TEST(Config, ReferenceListsEveryKey) {
    auto ref = config_reference();
    for (const char* k : {"[params]", "[potential]", "[solver]", "[sweep]", "[fraclap]", "[output]", "seed =",
                          "eps_min =", "force_plan ="})
        EXPECT_NE(ref.find(k), std::string::npos) << k;
}
