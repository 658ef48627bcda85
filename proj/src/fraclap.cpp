#include "fracdecay/fraclap.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>

namespace fd {

AmuResult amu(int N, double s, double mu, double tol) {
    AmuResult out;
    out.N = N;
    out.s = s;
    out.mu = mu;
    if (mu >= N) {
        out.divergent = true;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    if (mu <= 0.0) throw std::domain_error("amu: mu must be positive");

    const double d = mu - (N - 2.0 * s);
    // (rho^mu - 1)(rho^{-mu} - rho^{2s-N}) = (1 - rho^{-mu})(1 - rho^d), and
    // rho^{N-1} K(1, rho) = rho^{-1-2s} K(1/rho, 1).  scaled(L) is the integrand
    // times rho at rho = e^L, kept in logs so huge rho does not overflow.
    auto scaled = [&](double L) {
        double grow = d * L > 50.0 ? std::exp((d - 2.0 * s) * L) - std::exp(-2.0 * s * L)
                                   : std::expm1(d * L) * std::exp(-2.0 * s * L);
        return std::expm1(-mu * L) * grow * sphere_kernel_unit(N, s, std::exp(-L), 0.0);
    };
    auto integrand = [&](double x) { return scaled(std::log1p(x)) / (1.0 + x); };
    if (d == 0.0) return out;

    quad::Tolerance t{0.0, tol, 2000};
    quad::Result total;
    auto add = [&](const quad::Result& q) {
        total.value += q.value;
        total.error += q.error;
        total.converged = total.converged && q.converged;
    };

    const double eta = 0.5;
    const double k = 1.0 / (2.0 - 2.0 * s);
    add(quad::integrate(
        [&](double u) {
            double x = eta * std::pow(u, k);
            return integrand(x) * k * x / u;
        },
        {0.0, 0.125, 0.5, 1.0}, t));

    const double R1 = 64.0;
    add(quad::integrate(integrand, {eta, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, R1 - 1.0}, t));

    // rho = R1 t^{-1/beta} flattens the rho^{-beta-1} tail
    const double beta = std::min(N - mu, 2.0 * s);
    add(quad::integrate(
        [&](double u) {
            return scaled(std::log(R1) - std::log(u) / beta) / (beta * u);
        },
        {0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0}, t));

    out.value = total.value;
    out.error_estimate = total.error;
    if (!total.converged && total.error > 10.0 * tol * std::abs(total.value)) {
        throw std::runtime_error("amu: tolerance not met, achieved error " +
                                 std::to_string(total.error));
    }
    return out;
}

PointValue fraclap_w(int N, double s, double mu, double r, double lambda,
                     const PointwiseOptions& opt) {
    PointValue pv;
    const bool critical = std::abs(mu - (N - 2.0 * s)) < 1e-9;
    if (lambda * r > opt.asymptotic_radius && mu < N && !critical) {
        auto a = amu(N, s, mu);
        pv.value = std::pow(lambda, 2.0 * s) * 2.0 * a.value * std::pow(lambda * r, -mu - 2.0 * s);
        pv.error = std::pow(lambda, 2.0 * s) * 2.0 * a.error_estimate * std::pow(lambda * r, -mu - 2.0 * s);
        pv.asymptotic = true;
        return pv;
    }
    ZOptions zo;
    zo.rel_outer = opt.rel_tol;
    zo.rel_inner = opt.rel_tol * 1e-2;
    auto q = fraclap_radial(N, s, PowerWeightFn{mu, lambda}, r, zo);
    pv.value = q.value;
    pv.error = q.error;
    if (opt.throw_on_failure && !q.converged && q.error > 100.0 * opt.rel_tol * std::abs(q.value)) {
        throw std::runtime_error("fraclap_w: tolerance not met at r=" + std::to_string(r) +
                                 ", achieved error " + std::to_string(q.error));
    }
    return pv;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::positive_power: return "positive_power";
        case Regime::critical: return "critical";
        case Regime::negative_power: return "negative_power";
        case Regime::negative_log: return "negative_log";
        case Regime::negative_capped: return "negative_capped";
    }
    return "unknown";
}

RegimeReport regime_classify(int N, double s, double mu, bool scan_onset) {
    RegimeReport rep;
    const double crit = N - 2.0 * s;
    const double eps = 1e-12 * std::max(1.0, double(N));
    char buf[160];
    if (std::abs(mu - crit) <= eps) {
        rep.regime = Regime::critical;
        rep.sign = 1;
        rep.far_exponent = -(N + 2.0 * s);
        std::snprintf(buf, sizeof buf, "+C w^(2s*-1) ~ +C r^%.6g", rep.far_exponent);
    } else if (mu < crit) {
        rep.regime = Regime::positive_power;
        rep.sign = 1;
        rep.far_exponent = -(mu + 2.0 * s);
        std::snprintf(buf, sizeof buf, "+C r^%.6g", rep.far_exponent);
    } else if (mu < N - eps) {
        rep.regime = Regime::negative_power;
        rep.sign = -1;
        rep.far_exponent = -(mu + 2.0 * s);
        std::snprintf(buf, sizeof buf, "-C r^%.6g", rep.far_exponent);
    } else if (std::abs(mu - N) <= eps) {
        rep.regime = Regime::negative_log;
        rep.sign = -1;
        rep.far_exponent = -(N + 2.0 * s);
        rep.log_factor = true;
        std::snprintf(buf, sizeof buf, "-C ln r r^%.6g", rep.far_exponent);
    } else {
        rep.regime = Regime::negative_capped;
        rep.sign = -1;
        rep.far_exponent = -(N + 2.0 * s);
        std::snprintf(buf, sizeof buf, "-C r^%.6g", rep.far_exponent);
    }
    rep.far_field = buf;
    if (!scan_onset) return rep;

    std::vector<double> rs, vs;
    for (int i = 0; i <= 30; ++i) {
        double r = std::pow(10.0, 0.1 * i);
        rs.push_back(r);
        vs.push_back(fraclap_w(N, s, mu, r, 1.0, {1e-9, 1e4, false}).value);
    }
    rep.onset_radius = std::numeric_limits<double>::infinity();
    for (int i = static_cast<int>(rs.size()) - 2; i >= 0; --i) {
        bool ok = (vs[i] > 0) == (rep.sign > 0) && (vs[i + 1] > 0) == (rep.sign > 0);
        if (ok) {
            double slope = std::log(std::abs(vs[i + 1] / vs[i])) / std::log(rs[i + 1] / rs[i]);
            double allow = rep.log_factor ? 0.1 + 1.0 / std::log(rs[i] + 1.0) : 0.1;
            ok = std::abs(slope - rep.far_exponent) <= allow;
        }
        if (!ok) break;
        rep.onset_radius = rs[i];
    }
    return rep;
}

ScalingResult scaling_check(int N, double s, double mu, double lambda, double r) {
    PointwiseOptions o;
    o.asymptotic_radius = std::numeric_limits<double>::infinity();
    o.rel_tol = 1e-11;
    ScalingResult out;
    out.lhs = fraclap_w(N, s, mu, r, lambda, o).value;
    out.rhs = std::pow(lambda, 2.0 * s) * fraclap_w(N, s, mu, lambda * r, 1.0, o).value;
    double den = std::max(std::abs(out.rhs), std::numeric_limits<double>::min());
    out.relative_gap = std::abs(out.lhs - out.rhs) / den;
    return out;
}

double normalization_multiplier_at(int N, double s, double r) {
    ZOptions zo;
    auto q = fraclap_radial(N, s, GaussianFn{1.0}, r, zo);
    double exact = std::pow(2.0, s) * std::tgamma(0.5 * N + s) / std::tgamma(0.5 * N) *
                   boost::math::hypergeometric_1F1(0.5 * N + s, 0.5 * N, -0.5 * r * r);
    return q.value / exact;
}

double normalization_multiplier(int N, double s) {
    static std::mutex mtx;
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find({N, s});
        if (it != cache.end()) return it->second;
    }
    double m = normalization_multiplier_at(N, s, 0.0);
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(std::make_pair(N, s), m);
    return m;
}

GagliardoReport gagliardo_tail(int N, double s, double mu, double R) {
    GagliardoReport rep;
    rep.R = R;
    rep.predicted = mu > 0.5 * (N - 2.0 * s);
    const PowerWeightFn f{mu, 1.0};
    const double inf = std::numeric_limits<double>::infinity();
    ZOptions zo;
    zo.rel_outer = 1e-9;
    zo.rel_inner = 1e-11;
    const double area = sphere_area(N - 1);

    auto part = [&](double r, double lo, double hi) {
        auto e = [&](double rho, double th) { return squared_differences(f, r, rho, th); };
        return 0.5 * z_integral(N, s, r, 1.0, e, lo, hi, zo).value;
    };
    auto density = [&](double r) { return area * std::pow(r, N - 1) * part(r, 0.0, inf); };
    auto near_density = [&](double r) {
        return r > 0.0 ? area * std::pow(r, N - 1) * part(r, 0.0, 0.5 * r) : 0.0;
    };

    quad::Tolerance t{0.0, 1e-8, 400};
    std::vector<double> b0{0.0, 0.5, 1.0, 2.0, 4.0};
    for (double x = 8.0; x < R; x *= 2.0) b0.push_back(x);
    auto breaks0 = quad::clean_breaks(b0, 0.0, R);
    double g1 = quad::integrate(density, breaks0, t).value;
    double d1 = quad::integrate(density, {R, 1.5 * R, 2.0 * R}, t).value;
    double d2 = quad::integrate(density, {2.0 * R, 3.0 * R, 4.0 * R}, t).value;
    rep.partial = {g1, g1 + d1, g1 + d1 + d2};
    rep.near_part = quad::integrate(near_density, breaks0, t).value;
    rep.far_part = g1 - rep.near_part;
    rep.increment_ratio = d1 > 0.0 ? d2 / d1 : inf;
    rep.convergent = d1 > 0.0 && rep.increment_ratio < 1.0;
    return rep;
}

}  // namespace fd
