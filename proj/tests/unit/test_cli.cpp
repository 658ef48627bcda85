#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracdecay/commands.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("fd_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Run run(const fs::path& dir, const std::string& args, const std::string& ini) {
    std::ofstream(dir / "c.ini") << ini;
    std::string cmd = std::string(FD_CLI_PATH) + " --config " + (dir / "c.ini").string() + " " + args + " > " +
                      (dir / "stdout").string() + " 2> " + (dir / "stderr").string();
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "stdout");
    r.err = slurp(dir / "stderr");
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
        if (!l.empty()) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& row) {
    std::vector<std::string> out;
    std::istringstream is(row);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f);
    if (!row.empty() && row.back() == ',') out.push_back("");
    return out;
}

}  // namespace

TEST(Cli, Thresholds) {
    auto d = scratch("thr");
    auto r = run(d, "thresholds", "[params]\nN = 3\ns = 1/2\n[potential]\nkind = power-decay\nomega = 1\n");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("2_s^*    = 3\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("q_*      = 5/2"), std::string::npos);
    EXPECT_NE(r.out.find("q_omega  = 7/3"), std::string::npos);
}

TEST(Cli, ThresholdsOmegaEndpoints) {
    auto d = scratch("thr2");
    auto a = run(d, "thresholds", "[params]\nN = 3\ns = 1/2\n[potential]\nkind = power-decay\nomega = 0\n");
    EXPECT_NE(a.out.find("q_omega  = 2\n"), std::string::npos) << a.out;
    auto b = run(d, "thresholds", "[params]\nN = 3\ns = 1/2\n[potential]\nkind = power-decay\nomega = 1\n");
    EXPECT_NE(b.out.find("q_omega  = 7/3"), std::string::npos);  // 2 + 2s/N
}

TEST(Cli, CertifyDumpsTrace) {
    auto d = scratch("cert");
    auto r = run(d, "certify", "[params]\nN = 3\ns = 1/2\np = 11/5\n[potential]\nkind = power-decay\nomega = 1\n");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("mu_1 = 3\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("mu_5 = 533/625"), std::string::npos);
    EXPECT_NE(r.out.find("witness"), std::string::npos);
}

TEST(Cli, CertifyNotApplicableExitsThree) {
    auto d = scratch("cert2");
    auto r = run(d, "certify", "[params]\nN = 3\ns = 1/2\np = 12/5\n[potential]\nkind = power-decay\nomega = 1\n");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("threshold"), std::string::npos) << r.err;
}

TEST(Cli, ConfigErrorExitsTwo) {
    auto d = scratch("bad");
    EXPECT_EQ(run(d, "thresholds", "[params]\nnope = 1\n").code, 2);
    EXPECT_EQ(run(d, "thresholds", "[params]\nN = 1\ns = 3/5\n").code, 2);
}

TEST(Cli, SolveBelowThresholdExitsThree) {
    auto d = scratch("below");
    auto r = run(d, "solve --out " + (d / "o").string(),
                 "[params]\np = 21/10\n[potential]\nkind = power-decay\nomega = 2/5\ndelta = 0.5\n");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("16/7"), std::string::npos) << r.err;  // p_* = 2 + (2/5)/(7/5)
}

TEST(Cli, SolveWritesArtifactsDeterministically) {
    auto d = scratch("solve");
    const std::string ini =
        "[params]\np = 3\n[potential]\nkind = constant\ndelta = 0.5\n[solver]\neps_scan = 3\nbisect_steps = 1\n";
    auto a = run(d, "solve --seed 3 --out " + (d / "a").string(), ini);
    ASSERT_EQ(a.code, 0) << a.err;
    auto b = run(d, "solve --seed 3 --out " + (d / "b").string(), ini);
    ASSERT_EQ(b.code, 0) << b.err;
    for (const char* f : {"profile.txt", "metadata.json", "decay.csv", "margin_trace.csv"})
        EXPECT_TRUE(fs::exists(d / "a" / f)) << f;
    auto ra = lines(slurp(d / "a" / "decay.csv")), rb = lines(slurp(d / "b" / "decay.csv"));
    ASSERT_EQ(ra.size(), 2u);
    EXPECT_EQ(ra[0], fd::csv_header());
    auto fa = fields(ra[1]), fb = fields(rb[1]);
    ASSERT_EQ(fa.size(), 19u);
    fa[17] = fb[17] = "";  // wall_seconds
    EXPECT_EQ(fa, fb);
    EXPECT_LT(std::stod(fa[9]), 1.0);  // margin
    EXPECT_EQ(slurp(d / "a" / "profile.txt"), slurp(d / "b" / "profile.txt"));
}

TEST(Cli, SweepRowsAndConsistency) {
    auto d = scratch("sweep");
    auto r = run(d, "sweep --jobs 2 --out " + (d / "o").string(),
                 "[potential]\nkind = power-decay\ndelta = 0.5\n[sweep]\np = 21/10, 3, 7\n"
                 "omega = 0, 2/5, 1\neps = 0.02, 0.01, 0.005\n");
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(slurp(d / "o" / "sweep.csv"));
    ASSERT_EQ(rows.size(), 28u);
    for (size_t i = 1; i < rows.size(); ++i) {
        auto f = fields(rows[i]);
        ASSERT_EQ(f.size(), 19u) << rows[i];
        EXPECT_FALSE(f[16].empty()) << rows[i];
        double p = std::stod(f[2]), w = std::stod(f[3]);
        double th = w <= 0.8 ? 2.0 + w / (1.8 - w) : 2.0 + 0.8 / 0.2;
        if (p < th) {
            EXPECT_EQ(f[8], "0") << rows[i];
            EXPECT_TRUE(f[16] == "nonexistence" || f[16] == "infeasible") << rows[i];
        }
        if (f[8] == "1") EXPECT_TRUE(f[16] != "nonexistence") << rows[i];
    }
}

TEST(Cli, Selftest) {
    auto d = scratch("self");
    auto r = run(d, "selftest", "[params]\np = 3\n[potential]\nkind = constant\ndelta = 0.5\n");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(lines(r.out).size(), 4u) << r.out;
}

TEST(Cli, KeysReference) {
    auto d = scratch("keys");
    auto r = run(d, "keys", "");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, fd::config_reference());
}

TEST(Csv, HeaderOrder) {
    EXPECT_EQ(fd::csv_header(),
              "N,s,p,omega,eps,theta,tau,mu,feasible,margin,energy,residual,gamma_fit,gamma_pred_lo,"
              "gamma_pred_hi,r_squared,verdict,wall_seconds,error_class");
}
