#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fd::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
    bool converged = true;
};

struct Tolerance {
    double abs = 0.0;
    double rel = 1e-10;
    int max_intervals = 2000;
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule, on [-1,1].
struct Rule21 {
    std::array<double, 21> x{};
    std::array<double, 21> wk{};
    std::array<double, 21> wg{};

    Rule21() {
        using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
        using G = boost::math::quadrature::gauss<double, 10>;
        const auto& ax = GK::abscissa();
        const auto& aw = GK::weights();
        const auto& gw = G::weights();
        x[10] = 0.0;
        wk[10] = aw[0];
        wg[10] = 0.0;
        for (unsigned i = 1; i < ax.size(); ++i) {
            x[10 + i] = ax[i];
            x[10 - i] = -ax[i];
            wk[10 + i] = wk[10 - i] = aw[i];
            double g = (i % 2 == 1) ? gw[i / 2] : 0.0;
            wg[10 + i] = wg[10 - i] = g;
        }
    }
};

inline const Rule21& rule21() {
    static const Rule21 r;
    return r;
}

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece gk21(F& f, double a, double b) {
    const auto& R = rule21();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 21; ++i) {
        double v = f(c + h * R.x[i]);
        k += R.wk[i] * v;
        g += R.wg[i] * v;
    }
    k *= h;
    g *= h;
    double err = std::abs(k - g);
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(k));
    return {a, b, k, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod over [breaks.front(), breaks.back()].
/// Interior breakpoints seed the subdivision.
template <class F>
Result integrate(F&& f, const std::vector<double>& breaks, const Tolerance& tol = {}) {
    Result res;
    std::priority_queue<detail::Piece> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto p = detail::gk21(f, breaks[i], breaks[i + 1]);
        res.evals += 21;
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    while (!heap.empty() && err > std::max(tol.abs, tol.rel * std::abs(total))) {
        if (count >= tol.max_intervals) {
            res.converged = false;
            break;
        }
        auto p = heap.top();
        heap.pop();
        double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            res.converged = false;
            break;
        }
        auto l = detail::gk21(f, p.a, m);
        auto r = detail::gk21(f, m, p.b);
        res.evals += 42;
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // recompute the sum from the pieces to shed accumulated rounding
    double s = 0.0, e = 0.0;
    while (!heap.empty()) {
        s += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    res.value = s;
    res.error = e;
    return res;
}

template <class F>
Result integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
    return integrate(std::forward<F>(f), std::vector<double>{a, b}, tol);
}

/// Fixed Gauss-Legendre nodes and weights mapped to [0,1].
template <unsigned P>
struct GaussLegendre01 {
    std::array<double, P> x{};
    std::array<double, P> w{};
    GaussLegendre01() {
        using G = boost::math::quadrature::gauss<double, P>;
        const auto& ax = G::abscissa();
        const auto& aw = G::weights();
        std::vector<std::pair<double, double>> nodes;
        for (unsigned i = 0; i < ax.size(); ++i) {
            nodes.push_back({ax[i], aw[i]});
            if (ax[i] != 0.0) nodes.push_back({-ax[i], aw[i]});
        }
        std::sort(nodes.begin(), nodes.end());
        for (unsigned i = 0; i < P; ++i) {
            x[i] = 0.5 * (nodes[i].first + 1.0);
            w[i] = 0.5 * nodes[i].second;
        }
    }
};

template <unsigned P>
const GaussLegendre01<P>& gauss_legendre01() {
    static const GaussLegendre01<P> g;
    return g;
}

/// Sorted, deduplicated copy of a breakpoint list restricted to [lo, hi].
inline std::vector<double> clean_breaks(std::vector<double> b, double lo, double hi) {
    b.push_back(lo);
    b.push_back(hi);
    std::vector<double> out;
    std::sort(b.begin(), b.end());
    for (double v : b) {
        if (v < lo || v > hi || !std::isfinite(v)) continue;
        if (!out.empty() && v - out.back() <= 1e-12 * std::max(1.0, std::abs(v))) continue;
        out.push_back(v);
    }
    if (out.back() < hi) out.back() = hi;
    return out;
}

}  // namespace fd::quad
