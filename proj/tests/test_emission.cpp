#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rvb/emission.hpp"

using namespace rvb;

namespace {

BigRational frac(long long n, long long d) { return BigRational(n, d); }

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// Exact P(p) at the count nearest gamma * M.
double exact_prob_near(unsigned m, unsigned n, double gamma) {
  const auto p = static_cast<unsigned>(std::lround(gamma * m));
  return emission_probability_float(m, n, p);
}

}  // namespace

TEST_CASE("photon count probabilities on small systems") {
  CHECK(emission_probability(2, 2, 0) == frac(1, 3));
  CHECK(emission_probability(2, 2, 1) == frac(1, 2));
  CHECK(emission_probability(2, 2, 2) == frac(1, 6));

  CHECK(emission_probability(2, 3, 0) == frac(1, 2));
  CHECK(emission_probability(2, 3, 1) == frac(2, 5));
  CHECK(emission_probability(2, 3, 2) == frac(1, 10));

  CHECK(emission_probability(1, 1, 0) == frac(1, 2));
  CHECK(emission_probability(1, 1, 1) == frac(1, 2));

  CHECK(emission_probability(3, 1, 2) == frac(3, 4));
  CHECK(emission_probability(3, 1, 3) == frac(1, 4));

  CHECK(emission_probability(4, 0, 4) == frac(1, 1));
  CHECK(emission_probability(0, 5, 0) == frac(1, 1));

  CHECK_THROWS_AS(emission_probability(2, 3, 3), DomainError);
  CHECK_THROWS_AS(emission_probability(3, 1, 1), DomainError);
}

TEST_CASE("distribution agrees with the per-p closed form") {
  for (unsigned m = 0; m <= 40; m += 4)
    for (unsigned n = 0; n <= 40; n += 4) {
      const EmissionDistribution d = emission_distribution(m, n);
      CHECK(d.p_min == (m > n ? m - n : 0));
      CHECK(d.p_max() == m);
      for (unsigned p = d.p_min; p <= d.p_max(); ++p)
        CHECK(d.prob(p) == emission_probability(m, n, p));
    }
}

TEST_CASE("distribution normalizes exactly") {
  for (unsigned m = 0; m <= 60; m += 3)
    for (unsigned n = 0; n <= 60; n += 3) {
      const EmissionDistribution d = emission_distribution(m, n);
      BigRational sum = 0;
      for (const BigRational& q : d.probs) sum += q;
      CHECK(sum == BigRational(1));
    }
}

TEST_CASE("distribution accessors") {
  const EmissionDistribution d = emission_distribution(2, 3);
  CHECK(d.gamma(1) == doctest::Approx(0.5));
  CHECK(d.gamma(2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(d.prob(3), DomainError);

  const EmissionDistribution empty_top = emission_distribution(0, 4);
  CHECK(empty_top.probs.size() == 1);
  CHECK(empty_top.gamma(0) == 0.0);
}

TEST_CASE("float route matches exact arithmetic") {
  for (unsigned m = 0; m <= 60; m += 6)
    for (unsigned n = 0; n <= 60; n += 6) {
      const EmissionDistribution d = emission_distribution(m, n);
      for (unsigned p = d.p_min; p <= d.p_max(); ++p) {
        const double exact = to_double(d.prob(p));
        const double fast = emission_probability_float(m, n, p);
        CHECK(std::abs(fast - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
      }
    }

  // Far beyond the grid above: normalization and one exact spot check.
  double sum = 0.0;
  for (unsigned p = 0; p <= 900; ++p) sum += emission_probability_float(900, 900, p);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rel_err(emission_probability_float(900, 1800, 1),
                to_double(emission_probability(900, 1800, 1))) < 1e-10);
}

TEST_CASE("photon count moments") {
  const EmissionMoments m22 = emission_moments(2, 2);
  CHECK(m22.mean_p == frac(5, 6));
  CHECK(m22.var_p == frac(17, 36));

  const EmissionMoments m23 = emission_moments(2, 3);
  CHECK(m23.mean_p == frac(3, 5));

  const EmissionMoments m40 = emission_moments(4, 0);
  CHECK(m40.mean_p == frac(4, 1));
  CHECK(m40.var_p == frac(0, 1));

  CHECK(mean_gamma(2, 2) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(variance_gamma(2, 2) == doctest::Approx(17.0 / 144.0).epsilon(1e-15));
  CHECK(mean_gamma(2, 3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(mean_gamma(4, 0) == doctest::Approx(1.0));
  CHECK(variance_gamma(4, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(mean_gamma(0, 5), DomainError);
  CHECK_THROWS_AS(variance_gamma(0, 5), DomainError);
}

TEST_CASE("unpaired spin statistics") {
  const SpinonStats s22 = spinon_stats(2, 2);
  CHECK(s22.q_bar == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(s22.q_var == doctest::Approx(17.0 / 9.0).epsilon(1e-14));
  CHECK(s22.mean_var_ratio == doctest::Approx(15.0 / 17.0).epsilon(1e-14));

  const SpinonStats s11 = spinon_stats(1, 1);
  CHECK(s11.q_bar == doctest::Approx(1.0));
  CHECK(s11.q_var == doctest::Approx(1.0));
  CHECK(s11.mean_var_ratio == doctest::Approx(1.0));

  const SpinonStats s30 = spinon_stats(3, 0);
  CHECK(s30.q_bar == doctest::Approx(3.0));
  CHECK(s30.q_var == doctest::Approx(0.0));
  CHECK(std::isinf(s30.mean_var_ratio));

  // q = N - M + 2p ties the q mean to the p mean.
  for (unsigned m : {3u, 5u, 8u})
    for (unsigned n : {2u, 5u, 9u}) {
      const double mean_p = to_double(emission_moments(m, n).mean_p);
      CHECK(spinon_stats(m, n).q_bar ==
            doctest::Approx(n - static_cast<double>(m) + 2 * mean_p).epsilon(1e-12));
    }
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(1.5) == Regime::alpha_above_one);
  CHECK(classify_regime(1.0) == Regime::alpha_at_one);
  CHECK(classify_regime(0.5) == Regime::alpha_below_one);
}

TEST_CASE("asymptotic density closed forms") {
  CHECK(approx_distribution(Regime::alpha_above_one, 10, 2.0, 0.0) ==
        doctest::Approx(1.0));
  CHECK(approx_distribution(Regime::alpha_above_one, 10, 2.0, 0.1) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  CHECK(approx_distribution(Regime::alpha_at_one, 8, 1.0, 0.0) == 0.0);
  CHECK(approx_distribution(Regime::alpha_at_one, 8, 1.0, 0.5) ==
        doctest::Approx((1.0 / 1.5) * std::exp(-2.0)).epsilon(1e-14));

  CHECK(approx_distribution(Regime::alpha_below_one, 10, 0.5, 0.3) == 0.0);
  CHECK(approx_distribution(Regime::alpha_below_one, 10, 0.5, 0.5) ==
        doctest::Approx(0.5 * std::exp(-5.0)).epsilon(1e-14));
  CHECK(approx_distribution(Regime::alpha_below_one, 10, 0.5, 0.6) ==
        doctest::Approx(0.5 * std::exp(-6.5)).epsilon(1e-14));

  CHECK_THROWS_AS(approx_distribution(Regime::alpha_at_one, 10, 2.0, 0.1),
                  DomainError);
  CHECK_THROWS_AS(approx_distribution(Regime::alpha_above_one, 10, 2.0, 1.2),
                  DomainError);
  CHECK_THROWS_AS(approx_distribution(Regime::alpha_above_one, 10, 2.0, -0.1),
                  DomainError);
  CHECK_THROWS_AS(approx_distribution(Regime::alpha_above_one, 0, 2.0, 0.1),
                  DomainError);

  const AsymptoticCurve c = make_asymptotic_curve(10, 0.5);
  CHECK(c.regime == Regime::alpha_below_one);
  CHECK(c.gamma_c == doctest::Approx(0.5));
  CHECK(c.evaluate(0.5) ==
        doctest::Approx(approx_distribution(Regime::alpha_below_one, 10, 0.5, 0.5)));
}

TEST_CASE("balanced-case peak location") {
  CHECK(approx_peak_location(2) == doctest::Approx(0.5));
  CHECK(approx_peak_location(50) == doctest::Approx(0.1));
}

TEST_CASE("asymptotic form converges to the exact density at the peak") {
  double prev = 1e300;
  for (unsigned m : {50u, 200u, 400u}) {
    const double g = approx_peak_location(m);
    const double err = rel_err(exact_prob_near(m, m, g),
                               approx_distribution(Regime::alpha_at_one, m, 1.0, g));
    CHECK(err < 0.2);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("sweep points") {
  const SweepPoint edge = sweep_point(6, BigRational(0));
  CHECK(edge.n_down == 0);
  CHECK(edge.gamma_bar == doctest::Approx(1.0));
  CHECK(edge.m_times_var_gamma == doctest::Approx(0.0));
  CHECK(std::isinf(edge.mean_var_ratio));

  const SweepPoint half = sweep_point(4, frac(1, 2));
  CHECK(half.n_down == 2);
  CHECK(half.gamma_bar == doctest::Approx(mean_gamma(4, 2)).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(static_cast<void>(sweep_point(4, frac(1, 3))),
                       doctest::Contains("alpha"), DomainError);
  CHECK_THROWS_AS(sweep_point(0, frac(1, 1)), DomainError);
}

TEST_CASE("sweep point internal consistency") {
  for (unsigned m : {8u, 12u})
    for (long long num : {0ll, 1ll, 2ll, 3ll}) {
      const SweepPoint pt = sweep_point(m, frac(num, 2));
      const double alpha_f = to_double(pt.alpha);
      CHECK(pt.q_bar == doctest::Approx(m * (alpha_f - 1.0 + 2.0 * pt.gamma_bar))
                            .epsilon(1e-9));
      CHECK(pt.q_var ==
            doctest::Approx(4.0 * m * pt.m_times_var_gamma).epsilon(1e-9));
    }
}

TEST_CASE("sweep scaling across system sizes") {
  // Balanced point: gamma_bar shrinks like 1 / sqrt(M).
  for (unsigned m : {25u, 100u, 400u}) {
    const double scaled = sweep_point(m, BigRational(1)).gamma_bar * std::sqrt(m);
    CHECK(scaled > 0.5);
    CHECK(scaled < 1.5);
  }
  // Above the transition: gamma_bar shrinks like 1 / (M (alpha - 1)).
  double prev_gap = 1e300;
  for (unsigned m : {100u, 400u}) {
    const double product = sweep_point(m, BigRational(2)).gamma_bar * m;
    CHECK(product > 0.5);
    CHECK(product < 3.0);
    CHECK(std::abs(product - 1.0) < prev_gap);
    prev_gap = std::abs(product - 1.0);
  }
}

TEST_CASE("sweep over a list of imbalances") {
  const std::vector<BigRational> alphas = {frac(1, 2), frac(1, 1), frac(3, 2)};
  const std::vector<SweepPoint> pts = sweep_alpha(12, alphas);
  REQUIRE(pts.size() == 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].alpha == alphas[i]);
    CHECK(pts[i].gamma_bar ==
          doctest::Approx(sweep_point(12, alphas[i]).gamma_bar));
  }
  CHECK(pts[0].n_down == 6);
  CHECK(pts[2].n_down == 18);
}

TEST_CASE("thermodynamic limit of the mean emission fraction") {
  CHECK(extrapolate_thermo(1.5) == 0.0);
  CHECK(extrapolate_thermo(1.0) == 0.0);
  CHECK(extrapolate_thermo(0.25) == doctest::Approx(0.75));
  CHECK(extrapolate_thermo(0.0) == doctest::Approx(1.0));
}
