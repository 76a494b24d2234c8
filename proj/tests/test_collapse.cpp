#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "rvb/collapse.hpp"

using namespace rvb;

TEST_CASE("dense eigensolver sector weights on small systems") {
  const auto w11 = brute_force_sector_weights(SystemShape(1, 1));
  REQUIRE(w11.size() == 2);
  CHECK(w11[0].first.twice() == 0);
  CHECK(w11[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w11[1].first.twice() == 2);
  CHECK(w11[1].second == doctest::Approx(0.5).epsilon(1e-12));

  const auto w22 = brute_force_sector_weights(SystemShape(2, 2));
  REQUIRE(w22.size() == 3);
  CHECK(w22[0].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(w22[1].second == doctest::Approx(1.0 / 2.0).epsilon(1e-12));
  CHECK(w22[2].second == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  const auto w20 = brute_force_sector_weights(SystemShape(2, 0));
  REQUIRE(w20.size() == 1);
  CHECK(w20[0].first.twice() == 2);
  CHECK(w20[0].second == doctest::Approx(1.0).epsilon(1e-12));

  const auto w03 = brute_force_sector_weights(SystemShape(0, 3));
  REQUIRE(w03.size() == 1);
  CHECK(w03[0].first.twice() == 3);

  CHECK_THROWS_AS(brute_force_sector_weights(SystemShape(8, 7)), CapacityError);
}

TEST_CASE("eigensolver route matches the projector route") {
  for (unsigned mu = 1; mu <= 10; ++mu)
    for (unsigned m = 0; m <= mu; ++m) {
      const SystemShape shape(m, mu - m);
      const auto brute = brute_force_sector_weights(shape);
      REQUIRE(brute.size() == shape.p_max() - shape.p_min() + 1);
      double sum = 0.0;
      for (unsigned p = shape.p_min(); p <= shape.p_max(); ++p) {
        double w = 0.0;
        collapsed_state(shape, p, &w);
        const auto& entry = brute[p - shape.p_min()];
        CHECK(entry.first == shape.sector_spin(p));
        CHECK(entry.second == doctest::Approx(w).epsilon(1e-11));
        sum += entry.second;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-11));
    }
}

TEST_CASE("measurement ensemble on two spins") {
  const CollapseEnsemble ens = mixed_state_ensemble(SystemShape(1, 1));
  REQUIRE(ens.outcomes.size() == 2);

  const CollapseOutcome& dark = ens.outcomes[0];
  CHECK(dark.p == 0);
  CHECK(dark.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dark.unpaired == 0);
  CHECK(dark.state.amp[0b01] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(dark.state.amp[0b10] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));

  const CollapseOutcome& bright = ens.outcomes[1];
  CHECK(bright.p == 1);
  CHECK(bright.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bright.unpaired == 2);
  CHECK(bright.state.amp[0b00] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement ensemble structure") {
  const CollapseEnsemble ens = mixed_state_ensemble(SystemShape(2, 2));
  REQUIRE(ens.outcomes.size() == 3);
  const double probs[] = {1.0 / 3.0, 1.0 / 2.0, 1.0 / 6.0};
  for (unsigned i = 0; i < 3; ++i) {
    CHECK(ens.outcomes[i].p == i);
    CHECK(ens.outcomes[i].probability == doctest::Approx(probs[i]).epsilon(1e-12));
    CHECK(ens.outcomes[i].unpaired == 2 * i);
    CHECK(ens.outcomes[i].state.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned j = i + 1; j < 3; ++j)
      CHECK(std::abs(dot(ens.outcomes[i].state, ens.outcomes[j].state)) < 1e-12);

  const CollapseEnsemble trivial = mixed_state_ensemble(SystemShape(0, 3));
  REQUIRE(trivial.outcomes.size() == 1);
  CHECK(trivial.outcomes[0].probability == doctest::Approx(1.0));
  CHECK(trivial.outcomes[0].unpaired == 3);
  CHECK(trivial.outcomes[0].state.amp[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(mixed_state_ensemble(SystemShape(11, 10)), CapacityError);
}

TEST_CASE("ensemble branches match the closed form and the exact weights") {
  for (unsigned mu = 1; mu <= 9; ++mu)
    for (unsigned m = 0; m <= mu; ++m) {
      const SystemShape shape(m, mu - m);
      const CollapseEnsemble ens = mixed_state_ensemble(shape);
      for (const CollapseOutcome& out : ens.outcomes) {
        CHECK(out.probability ==
              doctest::Approx(to_double(emission_probability(m, mu - m, out.p)))
                  .epsilon(1e-12));
        CHECK(states_equal_up_to_phase(out.state, rvb_state(shape, out.p), 1e-9) ==
              PhaseRelation::equal_same_sign);
      }
    }
}

TEST_CASE("ensemble averages") {
  const CollapseEnsemble e22 = mixed_state_ensemble(SystemShape(2, 2));
  CHECK(ensemble_observable(e22, Observable::unpaired_count()) ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-12));

  const CollapseEnsemble e11 = mixed_state_ensemble(SystemShape(1, 1));
  CHECK(ensemble_observable(e11, Observable::s_tot_z()) ==
        doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ensemble_observable(e11, Observable::correlation(0, 1)) ==
        doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(ensemble_observable(e11, Observable::correlation(0, 2)),
                  DomainError);
}

TEST_CASE("ensemble statistics reproduce the analytic spinon statistics") {
  for (unsigned mu = 1; mu <= 10; ++mu)
    for (unsigned m = 0; m <= mu; ++m) {
      const SystemShape shape(m, mu - m);
      const CollapseEnsemble ens = mixed_state_ensemble(shape);
      const double q_bar = ensemble_observable(ens, Observable::unpaired_count());
      double q2 = 0.0;
      for (const CollapseOutcome& out : ens.outcomes)
        q2 += out.probability * out.unpaired * static_cast<double>(out.unpaired);
      const SpinonStats stats = spinon_stats(m, mu - m);
      CHECK(q_bar == doctest::Approx(stats.q_bar).epsilon(1e-11));
      CHECK(q2 - q_bar * q_bar ==
            doctest::Approx(stats.q_var).epsilon(1e-10).scale(1.0));
      // every branch leaves m_tot = -S, so <S_z> = -q_bar / 2
      CHECK(ensemble_observable(ens, Observable::s_tot_z()) ==
            doctest::Approx(-q_bar / 2.0).epsilon(1e-11));
    }
}

TEST_CASE("sampling is deterministic in (shape, shots, seed)") {
  const SampleReport a = sample_collapse(SystemShape(2, 2), 50000, 42);
  const SampleReport b = sample_collapse(SystemShape(2, 2), 50000, 42);
  CHECK(a.counts == b.counts);
  CHECK(a.chi_square == b.chi_square);
  CHECK(a.p_value_bound == b.p_value_bound);

  const SampleReport c = sample_collapse(SystemShape(2, 2), 50000, 43);
  CHECK(a.counts != c.counts);
}

TEST_CASE("sampling bookkeeping") {
  const SampleReport r = sample_collapse(SystemShape(1, 1), 100000, 7);
  REQUIRE(r.counts.size() == 2);
  CHECK(r.p_min == 0);
  CHECK(r.counts[0] + r.counts[1] == 100000);
  CHECK(r.expected[0] == doctest::Approx(50000.0));
  // 4 sigma band around the exact mean
  CHECK(std::abs(static_cast<double>(r.counts[0]) - 50000.0) < 4.0 * 158.2);
  CHECK(r.dof == 1);

  CHECK_THROWS_AS(sample_collapse(SystemShape(1, 1), 0, 7), DomainError);
}

TEST_CASE("sampling a deterministic window") {
  const SampleReport r = sample_collapse(SystemShape(2, 0), 5000, 11);
  REQUIRE(r.counts.size() == 1);
  CHECK(r.p_min == 2);
  CHECK(r.counts[0] == 5000);
  CHECK(r.chi_square == 0.0);
  CHECK(r.dof == 0);
  CHECK(r.p_value_bound == 1.0);
}

TEST_CASE("sampled frequencies stay in statistical range over many seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SampleReport r = sample_collapse(SystemShape(2, 2), 20000, seed);
    CHECK(r.dof == 2);
    CHECK(r.p_value_bound > 1e-4);
  }
}

TEST_CASE("chi-square merging policy") {
  SampleReport r;
  r.p_min = 0;
  r.counts = {48, 5, 50};
  r.expected = {53.0, 3.0, 47.0};
  chi_square_test(r);
  // middle bin (expected 3) merges toward the mode at index 0
  CHECK(r.dof == 1);
  CHECK(r.chi_square == doctest::Approx(9.0 / 56.0 + 9.0 / 47.0).epsilon(1e-12));

  SampleReport tiny;
  tiny.p_min = 0;
  tiny.counts = {100, 3, 4};
  tiny.expected = {100.0, 3.5, 3.5};
  chi_square_test(tiny);
  CHECK(tiny.dof == 0);
  CHECK(tiny.chi_square == 0.0);
  CHECK(tiny.p_value_bound == 1.0);

  SampleReport plain;
  plain.p_min = 0;
  plain.counts = {60, 40};
  plain.expected = {50.0, 50.0};
  chi_square_test(plain);
  CHECK(plain.dof == 1);
  CHECK(plain.chi_square == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(plain.p_value_bound == doctest::Approx(0.0455002638963584).epsilon(1e-10));
}

TEST_CASE("upper tail probabilities") {
  CHECK(gamma_q(0.5, 2.0) == doctest::Approx(0.0455002638963584).epsilon(1e-12));
  CHECK(gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(gamma_q(5.0, 2.0) == doctest::Approx(7.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(gamma_q(1.5, 0.0) == doctest::Approx(1.0));
  CHECK(gamma_q(1.0, 40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-10));
  double prev = 1.0;
  for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double q = gamma_q(1.0, x);
    CHECK(q < prev);
    prev = q;
  }
}
