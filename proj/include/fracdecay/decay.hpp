#pragma once

#include <string>
#include <vector>

#include "exponents.hpp"
#include "model.hpp"
#include "operator.hpp"

namespace fd {

struct FitWindow {
    double lo = 20.0;
    double hi = 500.0;
};

/// [max(4 R_L, 20), R_max / 2]
FitWindow default_window(double well_radius, double R_max);

enum class Verdict { matches_case_i, matches_case_ii, matches_case_iii, matches_case_iv, mismatch, unresolved_tail };
std::string to_string(Verdict v);

struct DecayReport {
    double fitted_gamma = 0.0;
    FitWindow window;
    double r_squared = 0.0;
    int samples = 0;
    DecayPrediction predicted;
    bool has_prediction = false;
    Verdict verdict = Verdict::unresolved_tail;
};

/// Least-squares slope of log u against log r at the given samples.
DecayReport fit_power_law(const std::vector<double>& r, const std::vector<double>& u);
/// Same, over the grid nodes of the profile that lie in the window.
DecayReport fit_tail(const RadialProfile& profile, FitWindow window);

struct RegimeTolerance {
    double two_sided = 0.15;  ///< |fitted - exponent| bound for cases (ii), (iv)
    double band = 0.15;       ///< width of [exponent - band, exponent] for cases (i), (iii)
    double min_r_squared = 0.995;
};

Verdict compare_regimes(const DecayReport& report, const RegimeTolerance& tol = {});

struct LowerBoundReport {
    double mu = 0.0;
    double c = 0.0;        ///< min over window of u / w_mu
    double spread = 0.0;   ///< max / min of u / w_mu over the window
};

/// One entry per checked exponent: the predicted lower exponent, or for case (ii)
/// the members N-2s+0.1 and N-2s+0.5 of the family.
std::vector<LowerBoundReport> verify_lower_bound(const RadialProfile& profile,
                                                 const DecayPrediction& prediction, FitWindow window,
                                                 int N, double s);

enum class SuperCase { A1, A2, A3, A4 };
std::string to_string(SuperCase c);
SuperCase supersolution_case(PlanCase c);

struct SupersolutionSampling {
    int per_octave = 2;
    double r_min = 1.0;     ///< smallest rescaled radius
    double t_max = 64.0;    ///< exterior samples at eps r' / R_L in [1, t_max]
};

/// Margin of the super-solution inequality for w_mu in the rescaled frame
/// x' = x / eps (concentration point at the origin):
///   (-Delta)^s w_mu + V(eps x') w_mu / 2 - eps^{theta-tau} |x'|^{-tau} 1{eps|x'| >= R_L} w_mu,
/// divided by w_mu |x'|^{-k} with k = 2s (A1, A2), omega (A3), or by
/// w_mu / log(e + |x'|^2) (A4).
struct SupersolutionReport {
    SuperCase kase = SuperCase::A1;
    double eps = 0.0;
    double onset = 0.0;          ///< rescaled radius past which every sample is >= 0; inf if none
    double min_margin = 0.0;     ///< min over samples beyond the onset (or overall min if none)
    double min_radius = 0.0;
    double exterior_min = 0.0;   ///< min over the samples with eps r' >= R_L
    std::vector<double> radii, margins, exterior_t, exterior_margins;
    bool holds = false;          ///< finite onset and nonnegative exterior
};

SupersolutionReport verify_supersolution(const PenalizationPlan& plan, const ProblemParams& params,
                                         const PotentialSpec& pot,
                                         const SupersolutionSampling& sampling = {});

}  // namespace fd
