#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "quadrature.hpp"
#include "radial.hpp"

namespace fd {

/// (1-t)^{-a} - (1+t)^{-a} for 0 <= t < 1, no cancellation for small t.
inline double symmetric_power_gap(double t, double a) {
    return std::expm1(-a * std::log1p(-t)) - std::expm1(-a * std::log1p(t));
}

/// lo^{-a} - hi^{-a} given lo and the gap hi - lo >= 0.
inline double power_gap(double lo, double gap, double a) {
    return -std::pow(lo, -a) * std::expm1(-a * std::log1p(gap / lo));
}

/// K(t, 1; delta) for 0 <= t <= 1, see sphere_kernel.
inline double sphere_kernel_unit(int N, double s, double t, double delta) {
    const double q = N + 2.0 * s;
    const double pi = std::numbers::pi;
    if (N == 1) {
        double k = 0.0;
        double d1 = 1.0 - t, d2 = 1.0 + t;
        if (d1 > delta && d1 > 0.0) k += std::pow(d1, -q);
        if (d2 > delta) k += std::pow(d2, -q);
        return k;
    }
    if (t == 0.0) return delta < 1.0 ? sphere_area(N - 1) : 0.0;
    if (delta >= 1.0 + t) return 0.0;
    if (N == 3) {
        const double a = 1.0 + 2.0 * s;
        double gap = delta <= 1.0 - t ? symmetric_power_gap(t, a)
                                      : power_gap(delta, 1.0 + t - delta, a);
        return 2.0 * pi / (a * t) * gap;
    }
    // |t e1 - sigma|^2 = (1-t)^2 + 4 t sin^2(theta/2)
    double th_lo = 0.0;
    if (delta > 1.0 - t) {
        double c = (1.0 + t * t - delta * delta) / (2.0 * t);
        th_lo = std::acos(std::clamp(c, -1.0, 1.0));
    }
    const double dd = 1.0 - t;
    auto f = [&](double th) {
        double sh = std::sin(0.5 * th);
        double d2 = dd * dd + 4.0 * t * sh * sh;
        return std::pow(d2, -0.5 * q) * (N == 2 ? 1.0 : std::pow(std::sin(th), N - 2));
    };
    std::vector<double> br;
    double thc = dd / std::sqrt(t);
    if (thc < 0.5 && th_lo == 0.0) {
        for (double x = std::max(thc, 1e-12) / 16.0; x < pi; x *= 2.0) br.push_back(x);
    }
    if (th_lo > 0.0) {
        for (double x = th_lo * 1.0625; x < pi; x = th_lo + 2.0 * (x - th_lo)) br.push_back(x);
    }
    auto res = quad::integrate(f, quad::clean_breaks(br, th_lo, pi), {0.0, 1e-13, 400});
    return sphere_area(N - 2) * res.value;
}

/// Spherical average of the kernel with a small ball removed:
///   K(r, rho; delta) = int_{S^{N-1}} |r e1 - rho sigma|^{-(N+2s)} 1{|r e1 - rho sigma| > delta} dsigma.
/// Closed forms for N = 1 and N = 3; angular quadrature otherwise.
inline double sphere_kernel(int N, double s, double r, double rho, double delta = 0.0) {
    const double big = std::max(r, rho);
    if (big == 0.0) return 0.0;
    return std::pow(big, -(N + 2.0 * s)) *
           sphere_kernel_unit(N, s, std::min(r, rho) / big, delta / big);
}

}  // namespace fd
