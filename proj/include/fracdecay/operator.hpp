#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace fd {

/// Nodes r_j = R_max (j/M)^q, j = 0..M.
struct RadialGrid {
    int M = 512;
    double q = 2.0;
    double R_max = 1e3;
    std::vector<double> r;

    static RadialGrid graded(int M, double q, double R_max);

    double at(double xi) const;      ///< continuous node map r(xi)
    double xi_at(double radius) const;
    double dr(double xi) const;      ///< r'(xi)
    double d2r(double xi) const;     ///< r''(xi)
    int size() const { return M + 1; }
};

/// Catmull-Rom weights for nodes j-1, j, j+1, j+2 at t in [0,1] of cell j.
inline std::array<double, 4> catmull_rom(double t) {
    const double t2 = t * t, t3 = t2 * t;
    return {0.5 * (-t + 2.0 * t2 - t3), 0.5 * (2.0 - 5.0 * t2 + 3.0 * t3),
            0.5 * (t + 4.0 * t2 - 3.0 * t3), 0.5 * (t3 - t2)};
}

/// Radial function on a grid: C^1 cubic interpolation in the index variable,
/// even reflection at the origin and u(r) = c_tail r^{-gamma_tail} past R_max.
struct RadialProfile {
    RadialGrid grid;
    std::vector<double> u;
    double gamma_tail = 1.0;
    double c_tail = 0.0;

    double value(double r) const;
    double ghost_factor() const;  ///< u_{M+1} / u_M
    void close_tail(double gamma);  ///< sets gamma_tail and c_tail from u_M
};

/// Discrete (-Delta)^s on radial profiles (coefficient-2 kernel).  Row i is
///   2 [m_i u_i - sum_j W_ij u_j - T_i(gamma) u_M] - b_i (Delta u)_i
/// where W integrates the interpolant against rho^{N-1} K(r_i, rho; delta_i)
/// over [0, R_max], T_i covers the power tail beyond R_max, m_i is the same
/// quadrature applied to the constant 1 and b_i (Delta u)_i is the Taylor
/// model of the excluded ball of radius delta_i.
class RadialOperator {
public:
    RadialOperator(RadialGrid grid, int N, double s, int jobs = 0);

    const RadialGrid& grid() const { return grid_; }
    int N() const { return N_; }
    double s() const { return s_; }
    int size() const { return grid_.size(); }

    Eigen::MatrixXd matrix(double gamma) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& u, double gamma) const;
    /// Lumped volumes |S^{N-1}| int_0^R phi_j rho^{N-1} drho of the hat functions phi_j.
    Eigen::VectorXd volume_weights(double gamma) const;
    /// int_R^inf (rho/R)^{-gamma} rho^{N-1} K(r_i, rho; delta_i) drho
    Eigen::VectorXd tail_column(double gamma) const;
    const std::vector<double>& ball_radius() const { return delta_; }

private:
    RadialGrid grid_;
    int N_;
    double s_;
    Eigen::MatrixXd W_;
    Eigen::VectorXd ghostW_, mass_, ball_;
    Eigen::VectorXd vol_, vol_ghost_;
    std::vector<double> delta_;
};

/// Shared, cached assembly keyed by (M, q, R_max, N, s).
std::shared_ptr<const RadialOperator> assemble_operator(const RadialGrid& grid, int N, double s,
                                                        int jobs = 0);

struct OperatorSelfTest {
    double mu = 0.0;
    double max_rel_error = 0.0;
    double worst_radius = 0.0;
    std::vector<double> radii, discrete, oracle;
};

/// Applies the operator to sampled w_mu (tail exponent mu) and compares with the
/// pointwise evaluator at n radii spread over [0, R_max/2].  Radii within a
/// factor 1.25 of a sign change of the oracle are skipped.
OperatorSelfTest operator_self_test(const RadialOperator& op, double mu, int n = 24);

}  // namespace fd
