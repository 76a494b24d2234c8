#include "rvb/emission.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>

namespace mp = boost::multiprecision;

namespace rvb {

namespace {

void check_window(unsigned m_up, unsigned n_down, unsigned p, const char* who) {
  const unsigned lo = m_up > n_down ? m_up - n_down : 0;
  if (p < lo || p > m_up)
    throw DomainError(std::string(who) + ": p = " + std::to_string(p) +
                      " outside [" + std::to_string(lo) + ", " +
                      std::to_string(m_up) + "]");
}

// Integer weight of outcome p: c_p = (N - M + 2p + 1) C(M + N + 1, M - p).
// The weights sum to (M + N + 1) C(M + N, M), giving P(p) = c_p / total.
BigInt sector_weight_int(unsigned m_up, unsigned n_down, unsigned p) {
  const long long q1 = static_cast<long long>(n_down) - m_up + 2LL * p + 1;
  return BigInt(q1) * binomial_exact(m_up + n_down + 1,
                                     static_cast<long long>(m_up) - p);
}

BigInt total_weight(unsigned m_up, unsigned n_down) {
  return BigInt(m_up + n_down + 1) * binomial_exact(m_up + n_down, m_up);
}

}  // namespace

BigRational emission_probability(unsigned m_up, unsigned n_down, unsigned p) {
  check_window(m_up, n_down, p, "emission_probability");
  const long long M = m_up, N = n_down, pp = p;
  const BigInt num = factorial(m_up) * factorial(n_down) *
                     BigInt(N - M + 2 * pp + 1);
  const BigInt den = factorial(static_cast<unsigned>(M - pp)) *
                     factorial(static_cast<unsigned>(N + pp + 1));
  return BigRational(num, den);
}

double emission_probability_float(unsigned m_up, unsigned n_down, unsigned p) {
  check_window(m_up, n_down, p, "emission_probability_float");
  const double M = m_up, N = n_down, pp = p;
  const double ln_p = ln_factorial(m_up) + ln_factorial(n_down) +
                      std::log(N - M + 2 * pp + 1) -
                      ln_factorial(m_up - p) - ln_factorial(n_down + p + 1);
  return std::exp(ln_p);
}

const BigRational& EmissionDistribution::prob(unsigned p) const {
  if (p < p_min || p > p_max())
    throw DomainError("EmissionDistribution::prob: p outside window");
  return probs[p - p_min];
}

double EmissionDistribution::gamma(unsigned p) const {
  if (p < p_min || p > p_max())
    throw DomainError("EmissionDistribution::gamma: p outside window");
  if (m_up == 0) return 0.0;
  return static_cast<double>(p) / static_cast<double>(m_up);
}

EmissionDistribution emission_distribution(unsigned m_up, unsigned n_down) {
  EmissionDistribution d;
  d.m_up = m_up;
  d.n_down = n_down;
  d.p_min = m_up > n_down ? m_up - n_down : 0;
  const BigInt total = total_weight(m_up, n_down);
  BigInt running = 0;
  d.probs.reserve(m_up - d.p_min + 1);
  for (unsigned p = d.p_min; p <= m_up; ++p) {
    const BigInt c = sector_weight_int(m_up, n_down, p);
    running += c;
    d.probs.emplace_back(c, total);
  }
  if (running != total)
    throw ContractViolation("emission_distribution: weights do not sum to total");
  return d;
}

EmissionMoments emission_moments(unsigned m_up, unsigned n_down) {
  const unsigned p_min = m_up > n_down ? m_up - n_down : 0;
  BigInt s0 = 0, s1 = 0, s2 = 0;
  for (unsigned p = p_min; p <= m_up; ++p) {
    const BigInt c = sector_weight_int(m_up, n_down, p);
    s0 += c;
    s1 += c * p;
    s2 += c * p * p;
  }
  EmissionMoments m;
  m.mean_p = BigRational(s1, s0);
  m.var_p = BigRational(s2, s0) - m.mean_p * m.mean_p;
  return m;
}

double mean_gamma(unsigned m_up, unsigned n_down) {
  if (m_up == 0) throw DomainError("mean_gamma undefined for m_up == 0");
  return to_double(emission_moments(m_up, n_down).mean_p / m_up);
}

double variance_gamma(unsigned m_up, unsigned n_down) {
  if (m_up == 0) throw DomainError("variance_gamma undefined for m_up == 0");
  return to_double(emission_moments(m_up, n_down).var_p /
                   (BigRational(m_up) * m_up));
}

SpinonStats spinon_stats(unsigned m_up, unsigned n_down) {
  const EmissionMoments m = emission_moments(m_up, n_down);
  const BigRational q_bar =
      BigRational(static_cast<long long>(n_down) - m_up) + 2 * m.mean_p;
  const BigRational q_var = 4 * m.var_p;
  SpinonStats s;
  s.q_bar = to_double(q_bar);
  s.q_var = to_double(q_var);
  s.mean_var_ratio = q_var == 0 ? std::numeric_limits<double>::infinity()
                                : to_double(q_bar / q_var);
  return s;
}

Regime classify_regime(double alpha) {
  if (alpha > 1.0) return Regime::alpha_above_one;
  if (alpha == 1.0) return Regime::alpha_at_one;
  return Regime::alpha_below_one;
}

double approx_distribution(Regime regime, unsigned m_up, double alpha,
                           double gamma) {
  if (m_up == 0) throw DomainError("approx_distribution: m_up must be positive");
  if (alpha < 0.0) throw DomainError("approx_distribution: negative alpha");
  if (gamma < 0.0 || gamma > 1.0)
    throw DomainError("approx_distribution: gamma outside [0, 1]");
  if (regime != classify_regime(alpha))
    throw DomainError("approx_distribution: regime tag contradicts alpha");
  const double m = m_up;
  switch (regime) {
    case Regime::alpha_above_one:
      return (alpha - 1.0) * std::exp(-m * (alpha - 1.0) * gamma);
    case Regime::alpha_at_one:
      return 2.0 * gamma / (1.0 + gamma) * std::exp(-m * gamma * gamma);
    case Regime::alpha_below_one: {
      const double gc = 1.0 - alpha;
      if (gamma < gc) return 0.0;
      return gc * std::exp(-2.0 * m * gc * gc) *
             std::exp(-3.0 * m * gc * (gamma - gc));
    }
  }
  throw ContractViolation("approx_distribution: unreachable regime");
}

double approx_peak_location(unsigned m_up) {
  if (m_up == 0) throw DomainError("approx_peak_location: m_up must be positive");
  return std::sqrt(1.0 / (2.0 * m_up));
}

double AsymptoticCurve::evaluate(double gamma) const {
  return approx_distribution(regime, m_up, alpha, gamma);
}

AsymptoticCurve make_asymptotic_curve(unsigned m_up, double alpha) {
  if (m_up == 0) throw DomainError("make_asymptotic_curve: m_up must be positive");
  if (alpha < 0.0) throw DomainError("make_asymptotic_curve: negative alpha");
  AsymptoticCurve c;
  c.regime = classify_regime(alpha);
  c.m_up = m_up;
  c.alpha = alpha;
  c.gamma_c = alpha < 1.0 ? 1.0 - alpha : 0.0;
  return c;
}

SweepPoint sweep_point(unsigned m_up, const BigRational& alpha) {
  if (m_up == 0) throw DomainError("sweep_point: m_up must be positive");
  if (alpha < 0) throw DomainError("sweep_point: negative alpha");
  const BigRational n_exact = alpha * m_up;
  if (mp::denominator(n_exact) != 1)
    throw DomainError("sweep_point: alpha * M is not an integer for alpha = " +
                      rational_string(alpha));
  const BigInt n_big = mp::numerator(n_exact);
  if (n_big > std::numeric_limits<unsigned>::max())
    throw DomainError("sweep_point: n_down overflows");
  const unsigned n_down = n_big.convert_to<unsigned>();

  SweepPoint pt;
  pt.alpha = alpha;
  pt.m_up = m_up;
  pt.n_down = n_down;
  const EmissionMoments m = emission_moments(m_up, n_down);
  pt.gamma_bar = to_double(m.mean_p / m_up);
  pt.m_times_var_gamma = to_double(m.var_p / m_up);
  const SpinonStats st = spinon_stats(m_up, n_down);
  pt.q_bar = st.q_bar;
  pt.q_var = st.q_var;
  pt.mean_var_ratio = st.mean_var_ratio;
  return pt;
}

std::vector<SweepPoint> sweep_alpha(unsigned m_up,
                                    const std::vector<BigRational>& alphas) {
  std::vector<SweepPoint> out;
  out.reserve(alphas.size());
  for (const auto& a : alphas) out.push_back(sweep_point(m_up, a));
  return out;
}

double extrapolate_thermo(double alpha) {
  if (alpha < 0.0) throw DomainError("extrapolate_thermo: negative alpha");
  return alpha >= 1.0 ? 0.0 : 1.0 - alpha;
}

}  // namespace rvb
