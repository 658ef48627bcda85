#include "fracdecay/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fd {

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::constant: return "constant";
        case PotentialKind::power_decay: return "power-decay";
        case PotentialKind::logarithmic_decay: return "logarithmic-decay";
        case PotentialKind::compact_support: return "compact-support";
        case PotentialKind::tabulated_radial: return "tabulated-radial";
    }
    return "?";
}

PotentialKind parse_potential_kind(const std::string& name) {
    for (auto k : {PotentialKind::constant, PotentialKind::power_decay, PotentialKind::logarithmic_decay,
                   PotentialKind::compact_support, PotentialKind::tabulated_radial}) {
        if (to_string(k) == name) return k;
    }
    if (name == "power") return PotentialKind::power_decay;
    if (name == "log") return PotentialKind::logarithmic_decay;
    if (name == "compact") return PotentialKind::compact_support;
    if (name == "tabulated") return PotentialKind::tabulated_radial;
    throw std::invalid_argument("unknown potential kind '" + name + "'");
}

PotentialSpec PotentialSpec::constant_well(double delta, double v0) {
    PotentialSpec p;
    p.kind = PotentialKind::constant;
    p.delta = delta;
    p.v0 = v0;
    return p;
}

PotentialSpec PotentialSpec::power_well(double omega, double delta, double R) {
    PotentialSpec p;
    p.kind = PotentialKind::power_decay;
    p.omega = omega;
    p.delta = delta;
    p.well_radius = R;
    return p;
}

PotentialSpec PotentialSpec::log_well(double delta, double R) {
    PotentialSpec p;
    p.kind = PotentialKind::logarithmic_decay;
    p.delta = delta;
    p.well_radius = R;
    return p;
}

PotentialSpec PotentialSpec::compact_well(double delta, double r_cut, double R) {
    PotentialSpec p;
    p.kind = PotentialKind::compact_support;
    p.omega = std::numeric_limits<double>::infinity();
    p.delta = delta;
    p.r_cut = r_cut;
    p.well_radius = R;
    return p;
}

namespace {

double well_factor(const PotentialSpec& pot, double r) {
    double x = r / pot.well_radius;
    return 1.0 + pot.delta * std::min(x * x, 1.0);
}

// 1 on [0, 0.9 rc], 0 on [rc, inf), C^1 smoothstep in between
double cutoff(double r, double rc) {
    double a = 0.9 * rc;
    if (r <= a) return 1.0;
    if (r >= rc) return 0.0;
    double t = (r - a) / (rc - a);
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

}  // namespace

PotentialValue eval_potential(const PotentialSpec& pot, double r) {
    if (r < 0.0) throw std::domain_error("eval_potential: r must be >= 0");
    if (pot.well_profile) return {pot.well_profile(r), false};
    switch (pot.kind) {
        case PotentialKind::constant: return {pot.v0 * well_factor(pot, r), false};
        case PotentialKind::power_decay:
            return {pot.v0 * well_factor(pot, r) * std::pow(1.0 + r * r, -0.5 * pot.omega), false};
        case PotentialKind::logarithmic_decay:
            return {pot.v0 * well_factor(pot, r) / std::log(std::numbers::e + r * r), false};
        case PotentialKind::compact_support:
            return {pot.v0 * well_factor(pot, r) * cutoff(r, pot.cutoff_radius()), false};
        case PotentialKind::tabulated_radial: {
            const auto& R = pot.table_r;
            const auto& V = pot.table_v;
            if (R.empty() || R.size() != V.size()) throw std::invalid_argument("bad potential table");
            if (r <= R.front()) return {V.front(), false};
            if (r > R.back()) return {V.back() * std::pow(r / R.back(), -pot.omega), true};
            auto it = std::upper_bound(R.begin(), R.end(), r);
            size_t j = static_cast<size_t>(it - R.begin());
            if (j >= R.size()) return {V.back(), false};
            double t = (r - R[j - 1]) / (R[j] - R[j - 1]);
            return {(1.0 - t) * V[j - 1] + t * V[j], false};
        }
    }
    return {0.0, false};
}

std::pair<double, double> derive_decay_bounds(const PotentialSpec& pot) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i <= 800; ++i) {
        double r = pot.well_radius * std::pow(1e8 / pot.well_radius, i / 800.0);
        double v = potential(pot, r) * (1.0 + std::pow(r, pot.omega));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

ValidationReport validate(const ProblemParams& params, const PotentialSpec& pot) {
    ValidationReport rep;
    auto& v = rep.violations;
    const int N = params.N;
    const double s = params.s;
    char buf[200];
    if (N < 1) v.push_back("N >= 1 fails");
    if (!(s > 0.0 && s < 1.0)) v.push_back("0 < s < 1 fails");
    if (!(N > 2.0 * s)) {
        v.push_back("N > 2s fails");
    } else {
        double crit = params.critical_exponent();
        if (!(params.p > 2.0)) v.push_back("p > 2 fails");
        if (!(params.p < crit)) {
            std::snprintf(buf, sizeof buf, "p < 2_s^* = %.10g fails", crit);
            v.push_back(buf);
        }
    }
    if (!(params.eps > 0.0)) v.push_back("eps > 0 fails");

    if (!(pot.well_radius > 0.0)) v.push_back("well radius > 0 fails");
    if (pot.kind == PotentialKind::tabulated_radial) {
        const auto& R = pot.table_r;
        if (R.size() < 2 || R.size() != pot.table_v.size()) v.push_back("potential table needs >= 2 rows");
        for (size_t i = 1; i < R.size(); ++i) {
            if (!(R[i] > R[i - 1])) {
                v.push_back("potential table radii not strictly increasing");
                break;
            }
        }
        if (!v.empty() && v.back().rfind("potential table", 0) == 0) return rep;
    }
    if (pot.kind == PotentialKind::compact_support && !(0.9 * pot.cutoff_radius() > pot.well_radius))
        v.push_back("compact support cutoff must start beyond the well radius");

    bool finite = true, nonneg = true;
    double log_inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
        double r = i == 0 ? 0.0 : 1e-3 * std::pow(1e9, i / 2000.0);
        double val = potential(pot, r);
        finite = finite && std::isfinite(val);
        nonneg = nonneg && val >= 0.0;
        log_inf = std::min(log_inf, val * std::log(std::numbers::e + r * r));
    }
    if (!finite) v.push_back("V finite fails");
    if (!nonneg) v.push_back("V >= 0 fails");
    if (finite && nonneg) {
        auto cv = verify_condition_V(pot, 1024);
        if (!cv.holds) {
            std::snprintf(buf, sizeof buf, "condition (V) fails: inf V on [0,R) = %.6g, V(R) = %.6g",
                          cv.v0, cv.boundary);
            v.push_back(buf);
        }
    }
    if (pot.kind == PotentialKind::power_decay && finite) {
        auto [dlo, dhi] = derive_decay_bounds(pot);
        double clo = pot.c_low > 0.0 ? pot.c_low : dlo;
        double chi = pot.c_high > 0.0 ? pot.c_high : dhi;
        if (!(clo > 0.0)) v.push_back("c_low > 0 fails");
        if (dlo < clo * (1.0 - 1e-12) || dhi > chi * (1.0 + 1e-12)) {
            std::snprintf(buf, sizeof buf, "(1+r^omega)V in [%.6g, %.6g] fails (sampled [%.6g, %.6g])",
                          clo, chi, dlo, dhi);
            v.push_back(buf);
        }
    }
    if (pot.kind == PotentialKind::logarithmic_decay && !(log_inf > 0.0))
        v.push_back("inf V log(e+r^2) > 0 fails");
    return rep;
}

ConditionVResult verify_condition_V(const PotentialSpec& pot, int sample_count) {
    if (sample_count < 16) throw std::domain_error("verify_condition_V: sample_count must be >= 16");
    ConditionVResult out;
    const double R = pot.well_radius;
    out.v0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sample_count; ++i) {
        double r = R * i / sample_count;
        double val = potential(pot, r);
        if (!std::isfinite(val)) throw std::runtime_error("verify_condition_V: non-finite potential");
        if (val < out.v0) {
            out.v0 = val;
            out.argmin = r;
        }
    }
    out.boundary = potential(pot, R);
    if (!std::isfinite(out.boundary)) throw std::runtime_error("verify_condition_V: non-finite potential");
    const double margin = 1e-9 * std::max(1.0, std::abs(out.boundary));
    out.holds = out.v0 > 0.0 && out.v0 < out.boundary - margin;
    return out;
}

}  // namespace fd
