#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "quadrature.hpp"
#include "radial.hpp"

namespace fd {

struct ZOptions {
    double rel_outer = 1e-11;
    double rel_inner = 1e-13;
    double abs_floor = 0.0;
    int max_outer = 800;
    int max_inner = 300;
};

/// int_lo^hi rho^{-1-2s} [ int_{S^{N-1}} E(rho, sigma) dsigma ] drho for an
/// integrand that is even under sigma -> -sigma and depends on sigma only
/// through the angle theta to x = r e1.  E is called as E(rho, theta) with
/// theta in [0, pi/2].  hi may be +infinity.
template <class E>
quad::Result z_integral(int N, double s, double r, double scale, E&& e, double lo, double hi,
                        const ZOptions& opt = {}) {
    const double pi = std::numbers::pi;
    const double inf = std::numeric_limits<double>::infinity();
    const double fold = N >= 2 ? 2.0 * sphere_area(N - 2) : 2.0;
    long evals = 0;

    auto angular = [&](double rho) -> double {
        if (N == 1) {
            ++evals;
            return 2.0 * e(rho, 0.0);
        }
        if (r == 0.0) {
            ++evals;
            return sphere_area(N - 1) * e(rho, 0.0);
        }
        auto f = [&](double th) {
            double w = N == 2 ? 1.0 : std::pow(std::sin(th), N - 2);
            return e(rho, th) * w;
        };
        std::vector<double> br;
        double thc = std::sqrt(scale * scale + (r - rho) * (r - rho)) / std::sqrt(r * rho);
        if (thc < 0.25 * pi) {
            for (double t = thc / 8.0; t < 0.5 * pi; t *= 2.0) br.push_back(t);
        }
        auto res = quad::integrate(f, quad::clean_breaks(br, 0.0, 0.5 * pi),
                                   {0.0, opt.rel_inner, opt.max_inner});
        evals += res.evals;
        return fold * res.value;
    };

    quad::Result total;
    const double rho0 = std::min(0.25 * scale, hi);
    const double rfar = std::max(2.0 * r + 8.0 * scale, lo);
    const quad::Tolerance tol{opt.abs_floor, opt.rel_outer, opt.max_outer};

    auto add = [&](const quad::Result& q) {
        total.value += q.value;
        total.error += q.error;
        total.converged = total.converged && q.converged;
    };

    double mid_lo = lo;
    if (lo == 0.0 && rho0 > 0.0) {
        // rho = rho0 t^k removes the rho^{1-2s} endpoint behaviour
        const double k = 1.0 / (2.0 - 2.0 * s);
        const double c = k * std::pow(rho0, 2.0 - 2.0 * s);
        auto g = [&](double t) {
            // rho^{-2s} / t = rho0^{2-2s} / rho^2; angular ~ rho^2 near 0, so clamping is harmless
            double rho = std::max(rho0 * std::pow(t, k), 1e-100 * rho0);
            return c * angular(rho) / (rho * rho);
        };
        add(quad::integrate(g, {0.0, 0.25, 0.5, 1.0}, tol));
        mid_lo = rho0;
    }
    const double mid_hi = std::min(hi, rfar);
    if (mid_hi > mid_lo) {
        std::vector<double> br;
        for (double t = std::max(mid_lo, rho0); t < mid_hi; t *= 2.0) br.push_back(t);
        if (r > 0.0) {
            br.push_back(r);
            for (double d = 0.25 * scale; d < r; d *= 2.0) {
                br.push_back(r - d);
                br.push_back(r + d);
            }
        }
        auto g = [&](double rho) { return std::pow(rho, -1.0 - 2.0 * s) * angular(rho); };
        add(quad::integrate(g, quad::clean_breaks(br, mid_lo, mid_hi), tol));
    }
    if (hi == inf) {
        const double R = std::max(rfar, lo);
        // rho = R t^{-1/(2s)} turns rho^{-1-2s} drho into a constant density
        const double c = std::pow(R, -2.0 * s) / (2.0 * s);
        auto g = [&](double t) { return c * angular(R * std::pow(t, -0.5 / s)); };
        add(quad::integrate(g, {0.0, 1e-4, 1e-2, 0.1, 0.5, 1.0}, tol));
    } else if (hi > rfar) {
        auto g = [&](double rho) { return std::pow(rho, -1.0 - 2.0 * s) * angular(rho); };
        std::vector<double> br;
        for (double t = rfar; t < hi; t *= 2.0) br.push_back(t);
        add(quad::integrate(g, quad::clean_breaks(br, rfar, hi), tol));
    }
    total.evals = evals;
    return total;
}

/// Second difference 2F(r^2) - F(|x+z|^2) - F(|x-z|^2) for |x| = r, |z| = rho,
/// angle theta between x and z.
template <class F>
double second_difference(const F& f, double r, double rho, double th) {
    const double a = r * r;
    const double c = std::cos(th);
    if (f.local(a, rho * rho + 2.0 * r * rho)) {
        double h1 = rho * rho + 2.0 * r * rho * c;
        double h2 = rho * rho - 2.0 * r * rho * c;
        return -f.rem(a, h1) - f.rem(a, h2) - 2.0 * f.slope(a) * rho * rho;
    }
    double sh = std::sin(0.5 * th);
    double t1 = a + rho * rho + 2.0 * r * rho * c;
    double t2 = (r - rho) * (r - rho) + 4.0 * r * rho * sh * sh;
    return 2.0 * f.value(a) - f.value(t1) - f.value(t2);
}

/// (u(x)-u(x+z))^2 + (u(x)-u(x-z))^2
template <class F>
double squared_differences(const F& f, double r, double rho, double th) {
    const double a = r * r;
    const double c = std::cos(th);
    double d1, d2;
    if (f.local(a, rho * rho + 2.0 * r * rho)) {
        d1 = f.diff(a, rho * rho + 2.0 * r * rho * c);
        d2 = f.diff(a, rho * rho - 2.0 * r * rho * c);
    } else {
        double sh = std::sin(0.5 * th);
        double fa = f.value(a);
        d1 = f.value(a + rho * rho + 2.0 * r * rho * c) - fa;
        d2 = f.value((r - rho) * (r - rho) + 4.0 * r * rho * sh * sh) - fa;
    }
    return d1 * d1 + d2 * d2;
}

/// (-Delta)^s u(x) = 2 P.V. int (u(x)-u(y)) |x-y|^{-(N+2s)} dy for a radial
/// profile family F, at |x| = r.
template <class F>
quad::Result fraclap_radial(int N, double s, const F& f, double r, const ZOptions& opt = {}) {
    auto e = [&](double rho, double th) { return second_difference(f, r, rho, th); };
    ZOptions o = opt;
    if (o.abs_floor == 0.0) {
        double sc = std::max(r, f.scale());
        o.abs_floor = 1e-16 * std::abs(f.value(r * r)) * std::pow(sc, -2.0 * s);
    }
    return z_integral(N, s, r, f.scale(), e, 0.0, std::numeric_limits<double>::infinity(), o);
}

// ---------------------------------------------------------------------------
// Non-template API (src/fraclap.cpp)

struct AmuResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool divergent = false;
    int N = 0;
    double s = 0.0;
    double mu = 0.0;
};

/// A_mu with (-Delta)^s |x|^{-mu} = 2 A_mu |x|^{-mu-2s}.  mu >= N is flagged divergent.
AmuResult amu(int N, double s, double mu, double tol = 1e-10);

struct PointValue {
    double value = 0.0;
    double error = 0.0;
    bool asymptotic = false;
};

struct PointwiseOptions {
    double rel_tol = 1e-10;
    double asymptotic_radius = 1e4;  ///< switch to 2 A_mu r^{-mu-2s} beyond this radius
    bool throw_on_failure = true;
};

/// (-Delta)^s w_mu at radius r, w_mu(x) = (1+|lambda x|^2)^{-mu/2}.
PointValue fraclap_w(int N, double s, double mu, double r, double lambda = 1.0,
                     const PointwiseOptions& opt = {});

inline double fraclap_w_pointwise(int N, double s, double mu, double r) {
    return fraclap_w(N, s, mu, r).value;
}

enum class Regime { positive_power, critical, negative_power, negative_log, negative_capped };
std::string to_string(Regime r);

struct RegimeReport {
    Regime regime = Regime::positive_power;
    int sign = 1;
    double far_exponent = 0.0;  ///< predicted r-exponent of |(-Delta)^s w_mu|
    bool log_factor = false;
    std::string far_field;      ///< human readable far-field law
    double onset_radius = -1.0; ///< radius past which sign and slope are stable; -1 if not scanned
};

RegimeReport regime_classify(int N, double s, double mu, bool scan_onset = true);

struct ScalingResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_gap = 0.0;
};

ScalingResult scaling_check(int N, double s, double mu, double lambda, double r);

/// Ratio of the coefficient-2 kernel operator to the Fourier multiplier |xi|^{2s},
/// measured on a Gaussian at radius r.
double normalization_multiplier_at(int N, double s, double r);
/// Cached value of normalization_multiplier_at(N, s, 0).
double normalization_multiplier(int N, double s);

struct GagliardoReport {
    double R = 0.0;
    std::array<double, 3> partial{};  ///< truncated seminorm^2 for |x| <= R, 2R, 4R
    double near_part = 0.0;           ///< I1 share (|x-y| <= |x|/2) of partial[0]
    double far_part = 0.0;            ///< I2 share of partial[0]
    double increment_ratio = 0.0;
    bool convergent = false;
    bool predicted = false;
};

GagliardoReport gagliardo_tail(int N, double s, double mu, double R);

}  // namespace fd
