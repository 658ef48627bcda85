#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace fd {

struct ProblemParams {
    int N = 1;
    double s = 0.4;
    double p = 3.0;
    double eps = 0.1;

    double critical_exponent() const { return 2.0 * N / (N - 2.0 * s); }
};

enum class PotentialKind { constant, power_decay, logarithmic_decay, compact_support, tabulated_radial };

std::string to_string(PotentialKind k);
PotentialKind parse_potential_kind(const std::string& name);

/// Radial potential.  The built-in families share the well factor
/// 1 + delta*min((r/R_L)^2, 1) on top of a decay profile:
///   constant           v0
///   power_decay        v0 (1+r^2)^{-omega/2}
///   logarithmic_decay  v0 / log(e + r^2)
///   compact_support    v0 times a smooth cutoff vanishing for r >= r_cut
/// tabulated_radial interpolates (table_r, table_v) linearly and extends by
/// the omega power law past the last radius.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::constant;
    double omega = 0.0;  ///< +inf for compact support
    double c_low = 0.0;  ///< bounds on (1+r^omega)V for r >= R_L; 0 means derive
    double c_high = 0.0;
    double well_radius = 1.0;
    double delta = 0.0;
    double v0 = 1.0;
    double r_cut = 0.0;  ///< compact support radius; 0 means 4*well_radius
    std::vector<double> table_r, table_v;
    std::function<double(double)> well_profile;  ///< optional override of V

    static PotentialSpec constant_well(double delta, double v0 = 1.0);
    static PotentialSpec power_well(double omega, double delta, double R = 1.0);
    static PotentialSpec log_well(double delta, double R = 1.0);
    static PotentialSpec compact_well(double delta, double r_cut, double R = 1.0);

    double cutoff_radius() const { return r_cut > 0.0 ? r_cut : 4.0 * well_radius; }
};

struct PotentialValue {
    double value = 0.0;
    bool extrapolated = false;
};

PotentialValue eval_potential(const PotentialSpec& pot, double r);
inline double potential(const PotentialSpec& pot, double r) { return eval_potential(pot, r).value; }

/// Default (c_low, c_high) from dense sampling on [R_L, 1e8].
std::pair<double, double> derive_decay_bounds(const PotentialSpec& pot);

struct ValidationReport {
    std::vector<std::string> violations;
    bool admissible() const { return violations.empty(); }
};

ValidationReport validate(const ProblemParams& params, const PotentialSpec& pot);

struct ConditionVResult {
    bool holds = false;
    double v0 = 0.0;        ///< sampled infimum on [0, R_L)
    double argmin = 0.0;
    double boundary = 0.0;  ///< V(R_L)
};

ConditionVResult verify_condition_V(const PotentialSpec& pot, int sample_count);

}  // namespace fd
