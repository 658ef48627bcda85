#include "fracdecay/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "fracdecay/fraclap.hpp"

namespace fd {

FitWindow default_window(double well_radius, double R_max) {
    return {std::max(4.0 * well_radius, 20.0), 0.5 * R_max};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::matches_case_i: return "matches_case_i";
        case Verdict::matches_case_ii: return "matches_case_ii";
        case Verdict::matches_case_iii: return "matches_case_iii";
        case Verdict::matches_case_iv: return "matches_case_iv";
        case Verdict::mismatch: return "mismatch";
        case Verdict::unresolved_tail: return "unresolved_tail";
    }
    return "?";
}

DecayReport fit_power_law(const std::vector<double>& r, const std::vector<double>& u) {
    if (r.size() != u.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    DecayReport rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] > 0.0 && u[i] > 0.0))
            throw std::domain_error("fit_power_law: nonpositive sample at r = " + std::to_string(r[i]));
        double x = std::log(r[i]), y = std::log(u[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    rep.samples = n;
    if (n < 3) return rep;
    double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
    if (!(cxx > 0.0)) return rep;
    rep.fitted_gamma = -cxy / cxx;
    rep.r_squared = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
    return rep;
}

DecayReport fit_tail(const RadialProfile& profile, FitWindow window) {
    std::vector<double> r, u;
    const auto& g = profile.grid;
    for (int j = 0; j <= g.M; ++j) {
        if (g.r[j] >= window.lo && g.r[j] <= window.hi) {
            r.push_back(g.r[j]);
            u.push_back(profile.u[j]);
        }
    }
    DecayReport rep = fit_power_law(r, u);
    rep.window = window;
    return rep;
}

Verdict compare_regimes(const DecayReport& rep, const RegimeTolerance& tol) {
    if (!rep.has_prediction) throw std::invalid_argument("compare_regimes: report has no prediction");
    if (rep.samples < 3 || rep.r_squared < tol.min_r_squared) return Verdict::unresolved_tail;
    const auto& pr = rep.predicted;
    const double g = rep.fitted_gamma;
    bool ok = false;
    switch (pr.case_label) {
        case 1:
        case 3: ok = g >= pr.upper.value - tol.band && g <= pr.upper.value; break;
        case 2: ok = std::abs(g - pr.upper.value) <= tol.two_sided; break;
        case 4: ok = std::abs(g - pr.lower.value) <= tol.two_sided; break;
        default: break;
    }
    if (!ok) return Verdict::mismatch;
    static const Verdict by_case[] = {Verdict::mismatch, Verdict::matches_case_i, Verdict::matches_case_ii,
                                      Verdict::matches_case_iii, Verdict::matches_case_iv};
    return by_case[pr.case_label];
}

std::vector<LowerBoundReport> verify_lower_bound(const RadialProfile& profile,
                                                 const DecayPrediction& prediction, FitWindow window,
                                                 int N, double s) {
    std::vector<double> mus;
    if (prediction.case_label == 2) {
        mus = {N - 2.0 * s + 0.1, N - 2.0 * s + 0.5};
    } else {
        mus = {prediction.lower.value};
    }
    std::vector<LowerBoundReport> out;
    const auto& g = profile.grid;
    for (double mu : mus) {
        LowerBoundReport lb;
        lb.mu = mu;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int j = 0; j <= g.M; ++j) {
            if (g.r[j] < window.lo || g.r[j] > window.hi) continue;
            double ratio = profile.u[j] * std::pow(1.0 + g.r[j] * g.r[j], 0.5 * mu);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        if (!(hi > 0.0)) throw std::invalid_argument("verify_lower_bound: empty window");
        lb.c = lo;
        lb.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        out.push_back(lb);
    }
    return out;
}

std::string to_string(SuperCase c) {
    switch (c) {
        case SuperCase::A1: return "A1";
        case SuperCase::A2: return "A2";
        case SuperCase::A3: return "A3";
        case SuperCase::A4: return "A4";
    }
    return "?";
}

SuperCase supersolution_case(PlanCase c) {
    switch (c) {
        case PlanCase::Q1_fast: return SuperCase::A1;
        case PlanCase::Q2_slow_omega_eq_2s: return SuperCase::A2;
        case PlanCase::Q2_slow_omega_lt_2s: return SuperCase::A3;
        case PlanCase::Q3_log: return SuperCase::A4;
    }
    return SuperCase::A1;
}

namespace {

// (-Delta)^s w_mu / w_mu, memoized across eps halvings
double lw_over_w(int N, double s, double mu, double r) {
    static std::mutex m;
    static std::map<std::tuple<int, double, double, double>, double> cache;
    auto key = std::make_tuple(N, s, mu, r);
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    double v = fraclap_w(N, s, mu, r).value * std::pow(1.0 + r * r, 0.5 * mu);
    std::lock_guard<std::mutex> lock(m);
    cache.emplace(key, v);
    return v;
}

}  // namespace

SupersolutionReport verify_supersolution(const PenalizationPlan& plan, const ProblemParams& params,
                                         const PotentialSpec& pot, const SupersolutionSampling& smp) {
    if (!(params.eps > 0.0)) throw std::domain_error("verify_supersolution: eps must be > 0");
    if (smp.per_octave < 1) throw std::domain_error("verify_supersolution: per_octave must be >= 1");
    SupersolutionReport rep;
    rep.kase = supersolution_case(plan.case_tag);
    rep.eps = params.eps;
    const int N = params.N;
    const double s = params.s, eps = params.eps;
    const double mu = plan.mu_d(), tau = plan.tau_d(), theta = plan.theta_d();
    const double RL = pot.well_radius;
    const double edge = RL / eps;  // boundary of the rescaled well

    double kappa = 2.0 * s;
    if (rep.kase == SuperCase::A3) kappa = to_double(rational_from_decimal(pot.omega));
    auto weight = [&](double r) {
        return rep.kase == SuperCase::A4 ? std::log(std::numbers::e + r * r) : std::pow(r, kappa);
    };
    auto margin = [&](double r) {
        double m = lw_over_w(N, s, mu, r) + 0.5 * potential(pot, eps * r);
        if (eps * r >= RL) m -= std::pow(eps, theta - tau) * std::pow(r, -tau);
        return m * weight(r);
    };

    // r' = edge 2^{k / per_octave}
    const double step = 1.0 / smp.per_octave;
    int k_lo = static_cast<int>(std::floor(std::log2(smp.r_min / edge) / step));
    while (edge * std::exp2(k_lo * step) < smp.r_min) ++k_lo;
    int k_hi = static_cast<int>(std::floor(std::log2(smp.t_max) / step + 1e-9));
    for (int k = k_lo; k <= k_hi; ++k) {
        double r = edge * std::exp2(k * step);
        rep.radii.push_back(r);
        rep.margins.push_back(margin(r));
        if (k >= 0) {
            rep.exterior_t.push_back(std::exp2(k * step));
            rep.exterior_margins.push_back(rep.margins.back());
        }
    }
    const size_t n = rep.radii.size();
    size_t first = n;
    while (first > 0 && rep.margins[first - 1] >= 0.0) --first;
    rep.onset = first < n ? rep.radii[first] : std::numeric_limits<double>::infinity();
    size_t from = first < n ? first : 0;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (size_t i = from; i < n; ++i) {
        if (rep.margins[i] < rep.min_margin) {
            rep.min_margin = rep.margins[i];
            rep.min_radius = rep.radii[i];
        }
    }
    rep.exterior_min = rep.exterior_margins.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : *std::min_element(rep.exterior_margins.begin(), rep.exterior_margins.end());
    rep.holds = first < n && rep.exterior_min >= 0.0;
    return rep;
}

}  // namespace fd
