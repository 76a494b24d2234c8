#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>

#include "rvb/errors.hpp"

namespace rvb {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// n! as an exact integer. Cached internally; cheap to call repeatedly.
BigInt factorial(unsigned n);

// Exact binomial coefficient C(n, k); zero for k < 0 or k > n.
BigInt binomial_exact(unsigned n, long long k);

// ln(n!) in double precision, 1e-12 relative accuracy for n <= 10^4.
// Table lookup for small n, Stirling series beyond.
double ln_factorial(unsigned n);

// Correctly scaled double conversion; safe for values far outside
// the range of the component integers.
double to_double(const BigRational& q);

// "num/den" in lowest terms, e.g. "1/3", "-2/5", "4/1".
std::string rational_string(const BigRational& q);

// A spin quantum number stored as twice its value, so 1/2 is exact.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  static constexpr HalfInteger from_twice(int t) {
    HalfInteger h;
    h.twice_ = t;
    return h;
  }
  static constexpr HalfInteger from_int(int v) { return from_twice(2 * v); }

  constexpr int twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  constexpr double value() const { return twice_ / 2.0; }

  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) {
    return from_twice(a.twice_ + b.twice_);
  }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) {
    return from_twice(a.twice_ - b.twice_);
  }
  constexpr HalfInteger operator-() const { return from_twice(-twice_); }
  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;

  std::string str() const;  // "3/2", "-1/2", "2"

 private:
  int twice_ = 0;
};

// Exact value sign * sqrt(radicand) with radicand a nonnegative rational.
// Closed under multiplication and negation; addition is deliberately
// not provided because sums of square roots leave this field.
class SqrtRational {
 public:
  SqrtRational() : sign_(0), radicand_(0) {}
  SqrtRational(int sign, BigRational radicand);

  static SqrtRational zero() { return SqrtRational(); }
  static SqrtRational sqrt_of(const BigRational& r);       // principal root
  static SqrtRational of_rational(const BigRational& q);   // exact embed of q

  int sign() const { return sign_; }
  const BigRational& radicand() const { return radicand_; }

  // Signed square: sign * radicand. Exact.
  BigRational squared_signed() const;

  bool is_zero() const { return sign_ == 0; }
  double to_double() const;

  SqrtRational operator*(const SqrtRational& o) const;
  SqrtRational operator-() const;
  bool operator==(const SqrtRational& o) const = default;

 private:
  int sign_;             // -1, 0, +1
  BigRational radicand_; // >= 0; zero iff sign_ == 0
};

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> via the Racah closed form,
// evaluated in exact rational arithmetic. Throws DomainError when the
// quantum numbers are inconsistent (negative j, |m| > j, parity mismatch,
// triangle violation, m1 + m2 != M).
SqrtRational cg_general(HalfInteger j1, HalfInteger m1, HalfInteger j2,
                        HalfInteger m2, HalfInteger J, HalfInteger M);

// Overlap amplitude E_lambda between the collapsed two-row state for
// (m_up, n_down, p) and the product of row Dicke states with lambda flipped
// spins in the upper row. Valid for max(0, M - N) <= p <= M and
// p <= lambda <= min(M, N + p); otherwise DomainError.
SqrtRational e_lambda(unsigned m_up, unsigned n_down, unsigned p,
                      unsigned lambda);

// Normalization constant of the closed-form post-emission state,
// delta(M, N, p) > 0.
SqrtRational delta_norm(unsigned m_up, unsigned n_down, unsigned p);

}  // namespace rvb
