#include "fracdecay/exponents.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fd {

namespace {

using boost::multiprecision::cpp_int;

Rational pow10(int e) {
    cpp_int t = 1;
    for (int i = 0; i < std::abs(e); ++i) t *= 10;
    return e >= 0 ? Rational(t) : Rational(cpp_int(1), t);
}

Rational midpoint(const Rational& a, const Rational& b) { return (a + b) / 2; }

void require_admissible(int N, const Rational& s) {
    if (!(s > 0 && s < 1)) throw std::domain_error("s must lie in (0,1)");
    if (!(Rational(N) > 2 * s)) throw std::domain_error("N > 2s fails");
}

enum class Chain { q1, q2_eq, q2_lt, q3 };

Chain chain_for(const Rational& s, const DecayClass& c) {
    switch (c.tag) {
        case DecayTag::fast: return Chain::q1;
        case DecayTag::log: return Chain::q3;
        case DecayTag::slow:
        case DecayTag::upper_slow:
            if (c.omega_infinite || c.omega > 2 * s) {
                if (c.tag == DecayTag::slow)
                    throw std::domain_error(
                        "use upper-slow classification; threshold formula for existence only "
                        "covers omega in [0,2s]");
                return Chain::q1;
            }
            if (c.omega < 0) throw std::domain_error("omega must be nonnegative");
            return c.omega == 2 * s ? Chain::q2_eq : Chain::q2_lt;
    }
    return Chain::q1;
}

struct ChainShape {
    Rational lower, mu_lo, mu_hi;
    PlanCase tag;
};

ChainShape shape(int N, const Rational& s, const DecayClass& c) {
    switch (chain_for(s, c)) {
        case Chain::q1: return {2 * s, 0, N - 2 * s, PlanCase::Q1_fast};
        case Chain::q2_eq: return {2 * s, N - 2 * s, Rational(N), PlanCase::Q2_slow_omega_eq_2s};
        case Chain::q2_lt: return {c.omega, Rational(N), N + 2 * s - c.omega, PlanCase::Q2_slow_omega_lt_2s};
        case Chain::q3: return {0, Rational(N), N + 2 * s, PlanCase::Q3_log};
    }
    throw std::logic_error("unreachable");
}

PenalizationPlan build_plan(const ChainShape& sh, const Rational& p, const Rational& mu) {
    PenalizationPlan plan;
    plan.lower = sh.lower;
    plan.mu_lo = sh.mu_lo;
    plan.mu_hi = sh.mu_hi;
    plan.chain_top = sh.mu_hi * (p - 2);
    plan.case_tag = sh.tag;
    plan.mu = mu;
    Rational top = mu * (p - 2);
    plan.tau = sh.lower + (top - sh.lower) / 3;
    plan.theta = sh.lower + 2 * (top - sh.lower) / 3;
    return plan;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw std::invalid_argument("empty number");
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(t.substr(0, slash));
        Rational den = parse_rational(t.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return num / den;
    }
    int exp10 = 0;
    auto epos = t.find_first_of("eE");
    if (epos != std::string::npos) {
        exp10 = std::stoi(t.substr(epos + 1));
        t = t.substr(0, epos);
    }
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    auto dot = t.find('.');
    std::string digits = t;
    if (dot != std::string::npos) {
        digits = t.substr(0, dot) + t.substr(dot + 1);
        exp10 -= static_cast<int>(t.size() - dot - 1);
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        throw std::invalid_argument("not a number: '" + text + "'");
    // cpp_int reads a leading 0 as an octal prefix
    auto nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    Rational v = Rational(cpp_int(digits)) * pow10(exp10);
    return neg ? Rational(-v) : v;
}

Rational rational_from_double(double x) { return Rational(x); }

Rational rational_from_decimal(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational_from_decimal: non-finite input");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return parse_rational(std::string(buf, res.ptr));
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << '/' << denominator(q);
    return os.str();
}

std::string to_string(const DecayClass& c) {
    auto w = c.omega_infinite ? std::string("inf") : to_string(c.omega);
    switch (c.tag) {
        case DecayTag::fast: return "fast";
        case DecayTag::slow: return "slow(" + w + ")";
        case DecayTag::upper_slow: return "upper-slow(" + w + ")";
        case DecayTag::log: return "log";
    }
    return "?";
}

std::string to_string(PlanCase c) {
    switch (c) {
        case PlanCase::Q1_fast: return "Q1_fast";
        case PlanCase::Q2_slow_omega_eq_2s: return "Q2_slow_omega_eq_2s";
        case PlanCase::Q2_slow_omega_lt_2s: return "Q2_slow_omega_lt_2s";
        case PlanCase::Q3_log: return "Q3_log";
    }
    return "?";
}

std::string to_string(CertRegime r) {
    switch (r) {
        case CertRegime::fast_Q1prime: return "fast_Q1prime";
        case CertRegime::slow_eq_2s: return "slow_eq_2s";
        case CertRegime::slow_lt_2s: return "slow_lt_2s";
    }
    return "?";
}

Rational critical_exponent(int N, const Rational& s) {
    require_admissible(N, s);
    return Rational(2 * N) / (N - 2 * s);
}

Rational q_star(int N, const Rational& s) {
    require_admissible(N, s);
    return 2 + 2 * s / (N - 2 * s);
}

Rational q_omega(int N, const Rational& s, const Rational& omega) {
    require_admissible(N, s);
    return 2 + omega / (N + 2 * s - omega);
}

Rational threshold_p_star(int N, const Rational& s, const DecayClass& c) {
    require_admissible(N, s);
    switch (chain_for(s, c)) {
        case Chain::q1: return q_star(N, s);
        case Chain::q2_eq:
        case Chain::q2_lt: return q_omega(N, s, c.omega);
        case Chain::q3: return 2;
    }
    return 2;
}

Rational nonexistence_threshold(int N, const Rational& s, const DecayClass& c) {
    require_admissible(N, s);
    if (c.tag == DecayTag::log) return 2;
    if (c.tag == DecayTag::fast || c.omega_infinite || c.omega > 2 * s) return q_star(N, s);
    return q_omega(N, s, c.omega);
}

MoserSequence moser_sequence(int N, const Rational& s, const Rational& p, int i_max) {
    const Rational crit = critical_exponent(N, s);
    if (!(p > 2 && p < crit)) throw std::domain_error("p must lie in (2, 2_s^*)");
    if (i_max < 1) throw std::domain_error("i_max must be >= 1");
    MoserSequence m;
    m.d = (p - 2) / (2 - crit);
    m.ratio = crit / 2;
    m.betas.push_back(1);
    Rational power = 1;
    for (int i = 0; i < i_max; ++i) {
        Rational next = (m.betas.back() * crit - p + 2) / 2;
        power *= m.ratio;
        if (next + m.d != power * (1 + m.d))
            throw std::logic_error("Moser closed form mismatch at i=" + std::to_string(i + 1));
        m.betas.push_back(next);
    }
    return m;
}

Rational PenalizationPlan::chain_margin(const Rational& p) const {
    Rational top = mu * (p - 2);
    Rational m = tau - lower;
    m = std::min(m, Rational(theta - tau));
    m = std::min(m, Rational(top - theta));
    m = std::min(m, Rational(chain_top - top));
    m = std::min(m, Rational(mu - mu_lo));
    m = std::min(m, Rational(mu_hi - mu));
    return m;
}

std::variant<PenalizationPlan, Infeasible> select_penalization(int N, const Rational& s,
                                                               const Rational& p,
                                                               const DecayClass& c) {
    const Rational crit = critical_exponent(N, s);
    const Rational th = threshold_p_star(N, s, c);
    if (!(p < crit)) return Infeasible{"p >= 2_s^* = " + to_string(crit), p, th, false};
    if (p == th)
        return Infeasible{"open-problem boundary: p = p_* = " + to_string(th), p, th, true};
    if (p < th) return Infeasible{"p <= " + to_string(th), p, th, false};
    const ChainShape sh = shape(N, s, c);
    Rational lo = std::max(sh.mu_lo, Rational(sh.lower / (p - 2)));
    return build_plan(sh, p, midpoint(lo, sh.mu_hi));
}

PenalizationPlan forced_plan(int N, const Rational& s, const Rational& p, const DecayClass& c) {
    require_admissible(N, s);
    if (!(p > 2)) throw std::domain_error("forced plan needs p > 2");
    const ChainShape sh = shape(N, s, c);
    PenalizationPlan plan;
    plan.lower = sh.lower;
    plan.mu_lo = sh.mu_lo;
    plan.mu_hi = sh.mu_hi;
    plan.chain_top = sh.mu_hi * (p - 2);
    plan.case_tag = sh.tag;
    plan.forced = true;
    plan.mu = midpoint(sh.mu_lo, sh.mu_hi);
    const Rational eta = s / 10;
    plan.tau = sh.lower + eta;
    plan.theta = plan.tau + eta;
    return plan;
}

std::variant<Certificate, NotApplicable> nonexistence_certificate(int N, const Rational& s,
                                                                  const Rational& p,
                                                                  const DecayClass& c) {
    const Rational crit = critical_exponent(N, s);
    if (!(p > 2 && p < crit)) return NotApplicable{"p outside (2, 2_s^*)"};
    Certificate cert;
    Rational threshold;
    if (c.tag == DecayTag::log) return NotApplicable{"logarithmic decay: threshold is 2"};
    if (c.tag == DecayTag::fast || c.omega_infinite || c.omega > 2 * s) {
        cert.regime = CertRegime::fast_Q1prime;
        cert.step = 2 * s;
        threshold = q_star(N, s);
    } else if (c.omega == 0) {
        return NotApplicable{"omega = 0: q_omega = 2, no p below it"};
    } else if (c.omega == 2 * s) {
        cert.regime = CertRegime::slow_eq_2s;
        cert.step = 2 * s;
        threshold = q_omega(N, s, c.omega);
    } else {
        cert.regime = CertRegime::slow_lt_2s;
        cert.step = c.omega;
        threshold = q_omega(N, s, c.omega);
    }
    if (!(p < threshold))
        return NotApplicable{"p = " + to_string(p) + " >= threshold " + to_string(threshold)};

    auto& mu = cert.mu_trace;
    const Rational& step = cert.step;
    switch (cert.regime) {
        case CertRegime::fast_Q1prime: {
            // mu_1 in (N-2s, N) close to N-2s with mu_1(p-1) < N, then
            // mu_2 in ((N-2s)/2, N-2s) with mu_2 + 2s > mu_1(p-1)
            const Rational lo = N - 2 * s;
            Rational off(1, 1000);
            while (!((lo + off * 2 * s) * (p - 1) < N)) off /= 2;
            cert.seed_offset = off;
            mu.push_back(lo + off * 2 * s);
            Rational a = std::max(Rational(lo / 2), Rational(mu[0] * (p - 1) - step));
            mu.push_back(midpoint(a, lo));
            cert.recurrence_from = 1;
            break;
        }
        case CertRegime::slow_eq_2s:
            mu.push_back(N);
            cert.recurrence_from = 0;
            break;
        case CertRegime::slow_lt_2s: {
            // mu_1 in (N+2s-omega, N+2s) with mu_1(p-1) < N+2s, then
            // mu_2 in (N, N+2s-omega) with mu_2 + omega > mu_1(p-1)
            const Rational lo = N + 2 * s - c.omega;
            Rational off(1, 1000);
            while (!((lo + off * c.omega) * (p - 1) < N + 2 * s)) off /= 2;
            cert.seed_offset = off;
            mu.push_back(lo + off * c.omega);
            Rational a = std::max(Rational(N), Rational(mu[0] * (p - 1) - step));
            mu.push_back(midpoint(a, lo));
            cert.recurrence_from = 1;
            break;
        }
    }
    const int max_steps = 100000;
    size_t first_check = 0;
    while (true) {
        bool done = false;
        for (size_t i = first_check; i < mu.size(); ++i) {
            if (mu[i] * p < N) {
                mu.resize(i + 1);
                done = true;
                break;
            }
        }
        if (done) break;
        first_check = mu.size();
        if (static_cast<int>(mu.size()) > max_steps)
            throw std::logic_error("certificate iteration did not terminate");
        mu.push_back(mu.back() * (p - 1) - step);
    }
    cert.steps = static_cast<int>(mu.size());
    if (cert.recurrence_from > static_cast<int>(mu.size()) - 1)
        cert.recurrence_from = static_cast<int>(mu.size()) - 1;
    cert.star_lo = std::max(Rational((N - 2 * s) / 2), mu.back());
    cert.star_hi = Rational(N) / p;
    cert.terminal_mu_star = midpoint(cert.star_lo, cert.star_hi);
    return cert;
}

std::string DecayPrediction::describe() const {
    std::ostringstream os;
    static const char* roman[] = {"?", "i", "ii", "iii", "iv"};
    os << "case (" << roman[std::clamp(case_label, 0, 4)] << "): lower ";
    if (lower.open)
        os << "1/(1+|x|^mu) for any mu > " << lower.value;
    else
        os << "1/(1+|x|^" << lower.value << ")";
    os << ", upper ";
    if (upper.open)
        os << "1/(1+|x|^gamma) for any gamma < " << upper.value;
    else
        os << "1/(1+|x|^" << upper.value << ")";
    return os.str();
}

DecayPrediction predict_decay(int N, const Rational& s, const Rational& p,
                              const std::optional<Rational>& omega) {
    const Rational crit = critical_exponent(N, s);
    if (omega && *omega < 0) throw std::domain_error("omega must be nonnegative");
    const bool beyond = !omega || *omega > 2 * s;
    const Rational th = beyond ? q_star(N, s) : q_omega(N, s, *omega);
    if (!(p > th))
        throw std::domain_error("p = " + to_string(p) + " <= p_* = " + to_string(th) +
                                ": no positive solutions below the threshold");
    if (!(p < crit)) throw std::domain_error("p >= 2_s^*");
    DecayPrediction d;
    const Rational knee = (N - 2 * s) * (p - 2);
    const double ns = to_double(N - 2 * s);
    if (omega && *omega < 2 * s) {
        d.case_label = 4;
        const double e = to_double(N + 2 * s - *omega);
        d.lower = {e, false};
        d.upper = {e, false};
    } else if (omega && *omega == 2 * s) {
        d.case_label = 3;
        d.lower = {double(N), false};
        d.upper = {double(N), true};
    } else if (!omega || *omega > knee) {
        // also covers knee <= 2s < omega
        d.case_label = 1;
        d.lower = {ns, false};
        d.upper = {ns, true};
    } else {
        d.case_label = 2;
        d.lower = {ns, true};
        d.upper = {ns, false};
    }
    return d;
}

}  // namespace fd
