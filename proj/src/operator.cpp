#include "fracdecay/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "fracdecay/fraclap.hpp"
#include "fracdecay/kernel.hpp"
#include "fracdecay/quadrature.hpp"
#include "fracdecay/radial.hpp"

namespace fd {

RadialGrid RadialGrid::graded(int M, double q, double R_max) {
    if (M < 8) throw std::domain_error("grid needs M >= 8");
    if (q < 1.0) throw std::domain_error("grid grading q must be >= 1");
    if (!(R_max > 0.0)) throw std::domain_error("R_max must be positive");
    RadialGrid g;
    g.M = M;
    g.q = q;
    g.R_max = R_max;
    g.r.resize(M + 1);
    for (int j = 0; j <= M; ++j) g.r[j] = g.at(j);
    g.r[M] = R_max;
    return g;
}

double RadialGrid::at(double xi) const { return R_max * std::pow(xi / M, q); }
double RadialGrid::xi_at(double radius) const { return M * std::pow(radius / R_max, 1.0 / q); }
double RadialGrid::dr(double xi) const { return q * R_max * std::pow(xi / M, q - 1.0) / M; }
double RadialGrid::d2r(double xi) const {
    return q * (q - 1.0) * R_max * std::pow(xi / M, q - 2.0) / (double(M) * M);
}

double RadialProfile::ghost_factor() const {
    return std::pow(grid.at(grid.M + 1) / grid.R_max, -gamma_tail);
}

void RadialProfile::close_tail(double gamma) {
    gamma_tail = gamma;
    c_tail = u.back() * std::pow(grid.R_max, gamma);
}

double RadialProfile::value(double r) const {
    const int M = grid.M;
    if (r >= grid.R_max) return u[M] * std::pow(r / grid.R_max, -gamma_tail);
    double xi = grid.xi_at(r);
    int c = std::min(static_cast<int>(xi), M - 1);
    double t = xi - c;
    auto w = catmull_rom(t);
    auto node = [&](int j) {
        if (j < 0) return u[-j];
        if (j > M) return u[M] * ghost_factor();
        return u[j];
    };
    return w[0] * node(c - 1) + w[1] * node(c) + w[2] * node(c + 1) + w[3] * node(c + 2);
}

namespace {

constexpr int kGL = 8;

struct RowData {
    std::vector<double> w;  // size M+1
    double ghost = 0.0;
    double mass = 0.0;
};

// Integrates phi_j(rho) rho^{N-1} K(r_i, rho; delta) over [0, R] for one row.
RowData assemble_row(const RadialGrid& g, int N, double s, int i, double delta) {
    const int M = g.M;
    const auto& gl = quad::gauss_legendre01<kGL>();
    const double ri = g.r[i];
    const double xs = i;  // singular point in xi
    const double xlo = ri - delta > 0.0 ? g.xi_at(ri - delta) : -1.0;
    const double xhi = g.xi_at(ri + delta);
    RowData row;
    row.w.assign(M + 1, 0.0);

    auto piece = [&](int c, double a, double b) {
        for (int k = 0; k < kGL; ++k) {
            double xi = a + (b - a) * gl.x[k];
            double rho = g.at(xi);
            double f = std::pow(rho, N - 1) * sphere_kernel(N, s, ri, rho, delta) * g.dr(xi) *
                       (b - a) * gl.w[k];
            if (f == 0.0) continue;
            auto cr = catmull_rom(xi - c);
            for (int m = 0; m < 4; ++m) {
                int j = c - 1 + m;
                double v = f * cr[m];
                if (j < 0)
                    row.w[-j] += v;
                else if (j > M)
                    row.ghost += v;
                else
                    row.w[j] += v;
            }
        }
    };

    for (int c = 0; c < M; ++c) {
        std::vector<double> cuts{double(c)};
        if (xlo > c && xlo < c + 1) cuts.push_back(xlo);
        if (xhi > c && xhi < c + 1) cuts.push_back(xhi);
        cuts.push_back(c + 1.0);
        std::sort(cuts.begin(), cuts.end());
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            double a = cuts[k], b = cuts[k + 1];
            if (b - a < 1e-14) continue;
            double mid = 0.5 * (a + b);
            bool inside = mid > xlo && mid < xhi;
            if (inside) {
                piece(c, a, b);  // cap-excluded kernel is smooth here
                continue;
            }
            // grade toward the kernel singularity at xi = i
            double near_end = b <= xs ? b : a;
            double far_end = b <= xs ? a : b;
            double dist = std::abs(near_end - xs);
            while (std::abs(far_end - near_end) > dist) {
                double step = b <= xs ? -dist : dist;
                double next = near_end + step;
                piece(c, std::min(near_end, next), std::max(near_end, next));
                near_end = next;
                dist = std::abs(near_end - xs);
            }
            piece(c, std::min(near_end, far_end), std::max(near_end, far_end));
        }
    }
    double sum = row.ghost;
    for (double v : row.w) sum += v;
    row.mass = sum;
    return row;
}

// int_R^inf (rho/R)^{-gamma} rho^{N-1} K(r, rho; delta) drho
double tail_integral(int N, double s, double R, double r, double delta, double gamma) {
    auto f = [&](double rho) {
        return std::pow(rho / R, -gamma) * std::pow(rho, N - 1) * sphere_kernel(N, s, r, rho, delta);
    };
    std::vector<double> br{R};
    if (r + delta > R) br.push_back(r + delta);
    double d = std::max(R - r, delta);
    for (double x = r + d; x < 2.0 * R; x = r + 2.0 * (x - r)) br.push_back(x);
    br.push_back(2.0 * R);
    auto b = quad::clean_breaks(br, R, 2.0 * R);
    quad::Tolerance tol{0.0, 1e-12, 400};
    double near = quad::integrate(f, b, tol).value;
    // rho = 2R t^{-1/k}, k = 2s + gamma
    const double k = 2.0 * s + gamma;
    const double B = 2.0 * R;
    auto g = [&](double t) {
        double rho = B * std::pow(t, -1.0 / k);
        return f(rho) * rho / (k * t);
    };
    double far = quad::integrate(g, {0.0, 1e-6, 1e-3, 0.05, 0.3, 1.0}, tol).value;
    return near + far;
}

}  // namespace

RadialOperator::RadialOperator(RadialGrid grid, int N, double s, int jobs)
    : grid_(std::move(grid)), N_(N), s_(s) {
    if (!(N > 2.0 * s) || !(s > 0.0 && s < 1.0)) throw std::domain_error("operator: inadmissible (N, s)");
    const int M = grid_.M;
    const int n = M + 1;
    const auto& r = grid_.r;
    delta_.resize(n);
    delta_[0] = r[1];
    for (int i = 1; i < M; ++i) delta_[i] = std::min(r[i] - r[i - 1], r[i + 1] - r[i]);
    delta_[M] = r[M] - r[M - 1];

    W_ = Eigen::MatrixXd::Zero(n, n);
    ghostW_ = Eigen::VectorXd::Zero(n);
    mass_ = Eigen::VectorXd::Zero(n);
    ball_ = Eigen::VectorXd::Zero(n);

    if (jobs <= 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    auto work = [&](int t) {
        for (int i = t; i < n; i += jobs) {
            RowData row = assemble_row(grid_, N_, s_, i, delta_[i]);
            for (int j = 0; j < n; ++j) W_(i, j) = row.w[j];
            ghostW_[i] = row.ghost;
            mass_[i] = row.mass + tail_integral(N_, s_, grid_.R_max, r[i], delta_[i], 0.0);
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }

    const double area = sphere_area(N - 1);
    for (int i = 0; i < n; ++i)
        ball_[i] = area * std::pow(delta_[i], 2.0 - 2.0 * s) / ((2.0 - 2.0 * s) * N);

    // lumped volume weights: hat functions in xi, so every weight is positive
    vol_ = Eigen::VectorXd::Zero(n);
    vol_ghost_ = Eigen::VectorXd::Zero(1);
    const auto& gl = quad::gauss_legendre01<kGL>();
    for (int c = 0; c < M; ++c) {
        for (int k = 0; k < kGL; ++k) {
            double xi = c + gl.x[k];
            double rho = grid_.at(xi);
            double f = area * std::pow(rho, N - 1) * grid_.dr(xi) * gl.w[k];
            vol_[c] += f * (1.0 - gl.x[k]);
            vol_[c + 1] += f * gl.x[k];
        }
    }
}

Eigen::VectorXd RadialOperator::tail_column(double gamma) const {
    const int n = size();
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = tail_integral(N_, s_, grid_.R_max, grid_.r[i], delta_[i], gamma);
    return t;
}

Eigen::VectorXd RadialOperator::volume_weights(double gamma) const {
    Eigen::VectorXd w = vol_;
    w[grid_.M] += vol_ghost_[0] * std::pow(grid_.at(grid_.M + 1) / grid_.R_max, -gamma);
    return w;
}

Eigen::MatrixXd RadialOperator::matrix(double gamma) const {
    const int M = grid_.M;
    const double gf = std::pow(grid_.at(M + 1) / grid_.R_max, -gamma);
    Eigen::MatrixXd A = -2.0 * W_;
    A.diagonal() += 2.0 * mass_;
    A.col(M) -= 2.0 * (ghostW_ * gf + tail_column(gamma));

    // Laplacian stencil in xi; r^2 + r^4 fit at the origin
    const auto& r = grid_.r;
    {
        double a1 = r[1] * r[1], a2 = r[2] * r[2];
        double det = a1 * a2 * a2 - a2 * a1 * a1;
        // a = (a2^2 (u1-u0) - a1^2 (u2-u0)) / det
        double c1 = a2 * a2 / det, c2 = -a1 * a1 / det;
        double lap = 2.0 * N_;
        A(0, 0) -= ball_[0] * lap * (-c1 - c2);
        A(0, 1) -= ball_[0] * lap * c1;
        A(0, 2) -= ball_[0] * lap * c2;
    }
    for (int i = 1; i <= M; ++i) {
        double rp = grid_.dr(i), rpp = grid_.d2r(i);
        // u' = (u+ - u-) / (2 r'), u'' = (u+ - 2u + u- - u' r'') / r'^2
        double cm = 0.0, c0 = 0.0, cp = 0.0;
        double d1 = 1.0 / (2.0 * rp);
        cm += -d1 * (N_ - 1) / r[i];
        cp += d1 * (N_ - 1) / r[i];
        double inv = 1.0 / (rp * rp);
        cm += inv * (1.0 + rpp * d1);
        c0 += -2.0 * inv;
        cp += inv * (1.0 - rpp * d1);
        A(i, i - 1) -= ball_[i] * cm;
        A(i, i) -= ball_[i] * c0;
        if (i < M)
            A(i, i + 1) -= ball_[i] * cp;
        else
            A(i, M) -= ball_[i] * cp * gf;
    }
    return A;
}

Eigen::VectorXd RadialOperator::apply(const Eigen::VectorXd& u, double gamma) const {
    return matrix(gamma) * u;
}

std::shared_ptr<const RadialOperator> assemble_operator(const RadialGrid& grid, int N, double s, int jobs) {
    using Key = std::tuple<int, double, double, int, double>;
    static std::mutex mtx;
    static std::map<Key, std::shared_ptr<const RadialOperator>> cache;
    Key key{grid.M, grid.q, grid.R_max, N, s};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto op = std::make_shared<const RadialOperator>(grid, N, s, jobs);
    std::lock_guard<std::mutex> lock(mtx);
    return cache.emplace(key, op).first->second;
}

OperatorSelfTest operator_self_test(const RadialOperator& op, double mu, int n) {
    OperatorSelfTest rep;
    rep.mu = mu;
    const auto& g = op.grid();
    Eigen::VectorXd u(g.size());
    for (int j = 0; j < g.size(); ++j) u[j] = std::pow(1.0 + g.r[j] * g.r[j], -0.5 * mu);
    Eigen::VectorXd Au = op.apply(u, mu);

    const int jmax = static_cast<int>(std::floor(g.xi_at(0.5 * g.R_max)));
    std::vector<int> idx;
    for (int k = 0; k < n; ++k) {
        int j = static_cast<int>(std::lround(double(k) * jmax / (n - 1)));
        if (idx.empty() || j != idx.back()) idx.push_back(j);
    }
    PointwiseOptions po;
    po.rel_tol = 1e-8;
    po.throw_on_failure = false;
    std::vector<double> orc;
    for (int j : idx) orc.push_back(fraclap_w(op.N(), op.s(), mu, g.r[j], 1.0, po).value);
    // a sign change between neighbouring samples marks a crossing radius
    std::vector<double> crossings;
    for (size_t k = 0; k + 1 < idx.size(); ++k) {
        if ((orc[k] > 0) != (orc[k + 1] > 0)) {
            double lo = g.r[idx[k]], hi = g.r[idx[k + 1]];
            double flo = orc[k];
            for (int it = 0; it < 60 && hi - lo > 1e-9 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = fraclap_w(op.N(), op.s(), mu, mid, 1.0, po).value;
                if ((fm > 0) == (flo > 0))
                    lo = mid;
                else
                    hi = mid;
            }
            crossings.push_back(0.5 * (lo + hi));
        }
    }
    for (size_t k = 0; k < idx.size(); ++k) {
        double rr = g.r[idx[k]];
        bool skip = false;
        for (double c : crossings) skip = skip || (rr > c / 1.25 && rr < c * 1.25);
        if (skip) continue;
        double err = std::abs(Au[idx[k]] - orc[k]) / std::abs(orc[k]);
        rep.radii.push_back(rr);
        rep.discrete.push_back(Au[idx[k]]);
        rep.oracle.push_back(orc[k]);
        if (err > rep.max_rel_error) {
            rep.max_rel_error = err;
            rep.worst_radius = rr;
        }
    }
    return rep;
}

}  // namespace fd
