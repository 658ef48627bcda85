#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fd {

using Rational = boost::multiprecision::cpp_rational;

/// Accepts "3", "-2/5", "0.375", "1e-3".  Decimal input is converted exactly.
Rational parse_rational(const std::string& text);
Rational rational_from_double(double x);  ///< exact binary value of x
/// Shortest decimal that round-trips to x, as a rational (0.4 -> 2/5).
Rational rational_from_decimal(double x);
double to_double(const Rational& q);
std::string to_string(const Rational& q);

enum class DecayTag { fast, slow, upper_slow, log };

struct DecayClass {
    DecayTag tag = DecayTag::fast;
    Rational omega = 0;
    bool omega_infinite = false;

    static DecayClass fast() { return {}; }
    static DecayClass slow(Rational w) { return {DecayTag::slow, w, false}; }
    static DecayClass upper_slow(Rational w) { return {DecayTag::upper_slow, w, false}; }
    static DecayClass log() { return {DecayTag::log, 0, false}; }
};

std::string to_string(const DecayClass& c);

Rational critical_exponent(int N, const Rational& s);
Rational q_star(int N, const Rational& s);
Rational q_omega(int N, const Rational& s, const Rational& omega);

/// Existence threshold for the class.  slow requires omega <= 2s.
Rational threshold_p_star(int N, const Rational& s, const DecayClass& c);

/// Threshold used by the nonexistence and lower-decay statements: q_* for
/// fast decay or omega > 2s, q_omega for omega in [0, 2s].
Rational nonexistence_threshold(int N, const Rational& s, const DecayClass& c);

struct MoserSequence {
    Rational d;
    Rational ratio;  ///< 2_s^* / 2
    std::vector<Rational> betas;
};

MoserSequence moser_sequence(int N, const Rational& s, const Rational& p, int i_max);

enum class PlanCase { Q1_fast, Q2_slow_omega_eq_2s, Q2_slow_omega_lt_2s, Q3_log };
std::string to_string(PlanCase c);

struct PenalizationPlan {
    Rational theta, tau, mu;
    Rational lower;        ///< left end of the chain (2s, omega or 0)
    Rational chain_top;    ///< right end: (upper mu endpoint)(p-2)
    Rational mu_lo, mu_hi; ///< admissible open interval for mu
    PlanCase case_tag = PlanCase::Q1_fast;
    bool forced = false;   ///< built without the feasibility check

    double theta_d() const { return to_double(theta); }
    double tau_d() const { return to_double(tau); }
    double mu_d() const { return to_double(mu); }
    /// Smallest gap in lower < tau < theta < mu(p-2) < chain_top.
    Rational chain_margin(const Rational& p) const;
};

struct Infeasible {
    std::string reason;
    Rational p, threshold;
    bool open_boundary = false;
};

std::variant<PenalizationPlan, Infeasible> select_penalization(int N, const Rational& s,
                                                               const Rational& p,
                                                               const DecayClass& c);

/// Same chain shape as select_penalization but without the threshold check;
/// used to probe parameters below the threshold.
PenalizationPlan forced_plan(int N, const Rational& s, const Rational& p, const DecayClass& c);

enum class CertRegime { fast_Q1prime, slow_eq_2s, slow_lt_2s };
std::string to_string(CertRegime r);

struct Certificate {
    std::vector<Rational> mu_trace;
    Rational terminal_mu_star;
    Rational star_lo, star_hi;  ///< open interval containing terminal_mu_star
    int steps = 0;
    CertRegime regime = CertRegime::fast_Q1prime;
    Rational step;              ///< 2s or omega
    int recurrence_from = 1;    ///< first index i with mu_{i+1} = mu_i(p-1) - step (0-based)
    Rational seed_offset;
};

struct NotApplicable {
    std::string reason;
};

std::variant<Certificate, NotApplicable> nonexistence_certificate(int N, const Rational& s,
                                                                  const Rational& p,
                                                                  const DecayClass& c);

struct Exponent {
    double value = 0.0;
    /// lower bound: the infimum over admissible mu, not attained.
    /// upper bound: only "any gamma below value" is asserted.
    bool open = false;
};

struct DecayPrediction {
    Exponent lower;  ///< u >= C / (1+|x|^lower)
    Exponent upper;  ///< u <= C / (1+|x|^upper)
    int case_label = 0;  ///< 1..4 for cases (i)-(iv)
    std::string describe() const;
};

/// omega empty means +infinity (compactly supported potential).
DecayPrediction predict_decay(int N, const Rational& s, const Rational& p,
                              const std::optional<Rational>& omega);

}  // namespace fd
