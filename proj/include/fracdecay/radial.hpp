#pragma once

#include <cmath>
#include <numbers>

namespace fd {

/// Area of the unit sphere S^k in R^{k+1}; |S^0| = 2.
inline double sphere_area(int k) {
    double h = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Integral of sin^{N-2} over [0, pi/2] (N >= 2).
inline double half_angle_measure(int N) {
    return 0.5 * std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (N - 1)) / std::tgamma(0.5 * N);
}

/// (1+e)^{-m} - 1 + m e without cancellation for small e.
inline double binomial_remainder(double m, double e) {
    if (std::abs(e) < 0.25) {
        double c = 0.5 * m * (m + 1.0);
        double ek = e * e;
        double sum = 0.0;
        for (int k = 2; k < 400; ++k) {
            double term = c * ek;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
            c *= (-m - k) / (k + 1.0);
            ek *= e;
        }
        return sum;
    }
    return std::expm1(-m * std::log1p(e)) + m * e;
}

/// e^x - 1 - x without cancellation for small x.
inline double exp_remainder(double x) {
    if (std::abs(x) < 0.5) {
        double term = 0.5 * x * x, sum = 0.0;
        for (int k = 3; k < 60; ++k) {
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
            term *= x / k;
        }
        return sum;
    }
    return std::expm1(x) - x;
}

// Radial profiles are written as F(t) with t = |y|^2.  Each family supplies
// accurate first differences and first-order Taylor remainders so that the
// second difference 2u(x) - u(x+z) - u(x-z) keeps full relative precision
// as |z| -> 0.

/// w_mu(lambda y) = (1 + lambda^2 |y|^2)^{-mu/2}
struct PowerWeightFn {
    double mu = 1.0;
    double lambda = 1.0;

    double m() const { return 0.5 * mu; }
    double value(double t) const { return std::pow(1.0 + lambda * lambda * t, -m()); }
    double ratio(double a, double h) const { return lambda * lambda * h / (1.0 + lambda * lambda * a); }
    double diff(double a, double h) const { return value(a) * std::expm1(-m() * std::log1p(ratio(a, h))); }
    double rem(double a, double h) const { return value(a) * binomial_remainder(m(), ratio(a, h)); }
    double slope(double a) const { return -m() * lambda * lambda * value(a) / (1.0 + lambda * lambda * a); }
    bool local(double a, double h) const { return std::abs(ratio(a, h)) < 0.5; }
    double scale() const { return 1.0 / lambda; }
};

/// exp(-lambda^2 |y|^2 / 2)
struct GaussianFn {
    double lambda = 1.0;

    double value(double t) const { return std::exp(-0.5 * lambda * lambda * t); }
    double diff(double a, double h) const { return value(a) * std::expm1(-0.5 * lambda * lambda * h); }
    double rem(double a, double h) const { return value(a) * exp_remainder(-0.5 * lambda * lambda * h); }
    double slope(double a) const { return -0.5 * lambda * lambda * value(a); }
    bool local(double, double h) const { return std::abs(0.5 * lambda * lambda * h) < 0.5; }
    double scale() const { return 1.0 / lambda; }
};

}  // namespace fd
