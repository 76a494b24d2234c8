#include "rvb/algebra.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mp = boost::multiprecision;

namespace rvb {

BigInt factorial(unsigned n) {
  static thread_local std::vector<BigInt> cache = {BigInt(1), BigInt(1)};
  while (cache.size() <= n) {
    cache.push_back(cache.back() * BigInt(cache.size()));
  }
  return cache[n];
}

BigInt binomial_exact(unsigned n, long long k) {
  if (k < 0 || k > static_cast<long long>(n)) return BigInt(0);
  const auto ku = static_cast<unsigned>(k);
  return factorial(n) / (factorial(ku) * factorial(n - ku));
}

namespace {

constexpr unsigned kLnFactTableSize = 4097;

const std::vector<double>& ln_fact_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLnFactTableSize);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (unsigned n = 1; n < kLnFactTableSize; ++n) {
      acc += std::log(static_cast<long double>(n));
      t[n] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

}  // namespace

double ln_factorial(unsigned n) {
  if (n < kLnFactTableSize) return ln_fact_table()[n];
  const long double x = n;
  const long double inv2 = 1.0L / (x * x);
  long double series = 1.0L / (12.0L * x);
  series -= inv2 / (360.0L * x);
  series += inv2 * inv2 / (1260.0L * x);
  series -= inv2 * inv2 * inv2 / (1680.0L * x);
  const long double half_ln_2pi = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
  return static_cast<double>((x + 0.5L) * std::log(x) - x + half_ln_2pi + series);
}

double to_double(const BigRational& q) {
  const BigInt num = mp::numerator(q);
  const BigInt den = mp::denominator(q);
  if (num == 0) return 0.0;
  BigInt a = mp::abs(num);
  BigInt d = den;
  constexpr long kKeepBits = 96;
  long sh_n = static_cast<long>(mp::msb(a)) + 1 - kKeepBits;
  long sh_d = static_cast<long>(mp::msb(d)) + 1 - kKeepBits;
  if (sh_n > 0) a >>= sh_n; else sh_n = 0;
  if (sh_d > 0) d >>= sh_d; else sh_d = 0;
  const long double r = a.convert_to<long double>() / d.convert_to<long double>();
  const long shift = sh_n - sh_d;
  const double out = static_cast<double>(
      std::ldexp(r, static_cast<int>(std::clamp(shift, -100000L, 100000L))));
  return num < 0 ? -out : out;
}

std::string rational_string(const BigRational& q) {
  return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

std::string HalfInteger::str() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

SqrtRational::SqrtRational(int sign, BigRational radicand)
    : sign_(sign), radicand_(std::move(radicand)) {
  if (sign_ < -1 || sign_ > 1) throw DomainError("SqrtRational: sign must be -1, 0 or +1");
  if (radicand_ < 0) throw DomainError("SqrtRational: negative radicand");
  if (radicand_ == 0) sign_ = 0;
  if (sign_ == 0) radicand_ = 0;
}

SqrtRational SqrtRational::sqrt_of(const BigRational& r) {
  if (r < 0) throw DomainError("SqrtRational::sqrt_of: negative argument");
  if (r == 0) return zero();
  return SqrtRational(1, r);
}

SqrtRational SqrtRational::of_rational(const BigRational& q) {
  if (q == 0) return zero();
  return SqrtRational(q > 0 ? 1 : -1, q * q);
}

BigRational SqrtRational::squared_signed() const {
  return sign_ >= 0 ? radicand_ : BigRational(-radicand_);
}

double SqrtRational::to_double() const {
  return sign_ * std::sqrt(rvb::to_double(radicand_));
}

SqrtRational SqrtRational::operator*(const SqrtRational& o) const {
  if (sign_ == 0 || o.sign_ == 0) return zero();
  return SqrtRational(sign_ * o.sign_, radicand_ * o.radicand_);
}

SqrtRational SqrtRational::operator-() const {
  return SqrtRational(-sign_, radicand_);
}

namespace {

// Factorial of a doubled quantum number; caller guarantees evenness.
BigInt fact_twice(int t) {
  if (t % 2 != 0 || t < 0) throw ContractViolation("fact_twice: odd or negative argument");
  return factorial(static_cast<unsigned>(t / 2));
}

void validate_jm_pair(HalfInteger j, HalfInteger m, const char* name) {
  if (j.twice() < 0)
    throw DomainError(std::string("cg_general: negative angular momentum ") + name);
  if (std::abs(m.twice()) > j.twice())
    throw DomainError(std::string("cg_general: |m| exceeds ") + name);
  if ((j.twice() - m.twice()) % 2 != 0)
    throw DomainError(std::string("cg_general: j - m is not an integer for ") + name);
}

}  // namespace

SqrtRational cg_general(HalfInteger j1, HalfInteger m1, HalfInteger j2,
                        HalfInteger m2, HalfInteger J, HalfInteger M) {
  validate_jm_pair(j1, m1, "j1");
  validate_jm_pair(j2, m2, "j2");
  validate_jm_pair(J, M, "J");
  if ((j1.twice() + j2.twice() + J.twice()) % 2 != 0)
    throw DomainError("cg_general: j1 + j2 + J is not an integer");
  if (J.twice() < std::abs(j1.twice() - j2.twice()) ||
      J.twice() > j1.twice() + j2.twice())
    throw DomainError("cg_general: triangle rule violated");
  if (m1.twice() + m2.twice() != M.twice())
    throw DomainError("cg_general: m1 + m2 != M");

  const int tj1 = j1.twice(), tm1 = m1.twice();
  const int tj2 = j2.twice(), tm2 = m2.twice();
  const int tJ = J.twice(), tM = M.twice();

  const BigRational triangle =
      BigRational(fact_twice(tj1 + tj2 - tJ) * fact_twice(tj1 - tj2 + tJ) *
                      fact_twice(-tj1 + tj2 + tJ),
                  fact_twice(tj1 + tj2 + tJ + 2));
  const BigRational weights(fact_twice(tJ + tM) * fact_twice(tJ - tM) *
                            fact_twice(tj1 - tm1) * fact_twice(tj1 + tm1) *
                            fact_twice(tj2 - tm2) * fact_twice(tj2 + tm2));
  const BigRational prefactor = BigRational(tJ + 1) * triangle * weights;

  const int k_min = std::max({0, -(tJ - tj2 + tm1) / 2, -(tJ - tj1 - tm2) / 2});
  const int k_max =
      std::min({(tj1 + tj2 - tJ) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
  BigRational sum = 0;
  for (int k = k_min; k <= k_max; ++k) {
    const BigInt denom = factorial(k) * fact_twice(tj1 + tj2 - tJ - 2 * k) *
                         fact_twice(tj1 - tm1 - 2 * k) *
                         fact_twice(tj2 + tm2 - 2 * k) *
                         fact_twice(tJ - tj2 + tm1 + 2 * k) *
                         fact_twice(tJ - tj1 - tm2 + 2 * k);
    const BigRational term(1, denom);
    if (k % 2 == 0) sum += term; else sum -= term;
  }
  if (sum == 0) return SqrtRational::zero();
  const int sign = sum > 0 ? 1 : -1;
  return SqrtRational(sign, prefactor * sum * sum);
}

SqrtRational e_lambda(unsigned m_up, unsigned n_down, unsigned p,
                      unsigned lambda) {
  const long long M = m_up, N = n_down, pp = p, lam = lambda;
  if (pp > M || M - pp > N)
    throw DomainError("e_lambda: p outside [max(0, M - N), M]");
  if (lam < pp || lam > M || lam > N + pp)
    throw DomainError("e_lambda: lambda outside [p, min(M, N + p)]");

  const auto f = [](long long n) { return factorial(static_cast<unsigned>(n)); };
  const BigRational outer(f(N + pp - lam) * f(lam), f(N - M + pp) * f(pp));
  const BigRational inner =
      BigRational(f(pp) * f(N - M + pp) * f(M - pp) * f(N - M + 2 * pp),
                  f(N + pp + 1) * f(lam) * f(M - lam) * f(N - lam + pp) * f(lam - pp)) *
      BigRational(N - M + 2 * pp + 1);
  const int sign = (lam - pp) % 2 == 0 ? 1 : -1;
  return SqrtRational(sign, outer * outer * inner);
}

SqrtRational delta_norm(unsigned m_up, unsigned n_down, unsigned p) {
  const long long M = m_up, N = n_down, pp = p;
  if (pp > M || M - pp > N)
    throw DomainError("delta_norm: p outside [max(0, M - N), M]");
  const auto f = [](long long n) { return factorial(static_cast<unsigned>(n)); };
  BigRational rad(f(M) * f(N) * f(M - pp) * f(N - M + pp) * f(pp) * f(N + pp + 1),
                  f(N - M + 2 * pp + 1));
  rad /= BigRational(BigInt(1) << static_cast<unsigned>(M - pp));
  return SqrtRational(1, rad);
}

}  // namespace rvb
