#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rvb/algebra.hpp"
#include "rvb/emission.hpp"
#include "rvb/spin_states.hpp"

namespace rvb {

// One measurement branch: p photons seen with this probability, leaving
// this normalized post-measurement state.
struct CollapseOutcome {
  unsigned p = 0;
  double probability = 0.0;
  unsigned unpaired = 0;  // 2 S_tot, measured from the state itself
  StateVector state;
};

// The full post-measurement mixed state, one branch per emission count.
struct CollapseEnsemble {
  SystemShape shape;
  std::vector<CollapseOutcome> outcomes;
};

CollapseEnsemble mixed_state_ensemble(SystemShape shape);

// Observables evaluated branch-by-branch and averaged with the branch
// probabilities.
struct Observable {
  enum class Kind { spin_correlation, s_tot_z, unpaired_count } kind;
  unsigned site_i = 0;
  unsigned site_j = 0;

  static Observable correlation(unsigned i, unsigned j) {
    return {Kind::spin_correlation, i, j};
  }
  static Observable s_tot_z() { return {Kind::s_tot_z, 0, 0}; }
  static Observable unpaired_count() { return {Kind::unpaired_count, 0, 0}; }
};

double ensemble_observable(const CollapseEnsemble& ens, const Observable& obs);

// Sector weights of the initial product state from a dense eigendecomposition
// of S^2 in the fixed-m_tot subspace. Deliberately shares no logic with the
// polynomial projector path; used as an independent cross-check.
// Capped at mu <= 14 (CapacityError beyond).
std::vector<std::pair<HalfInteger, double>> brute_force_sector_weights(
    SystemShape shape);

// Monte Carlo draw of emission counts from the exact distribution.
struct SampleReport {
  unsigned m_up = 0;
  unsigned n_down = 0;
  unsigned long long shots = 0;
  std::uint64_t seed = 0;
  unsigned p_min = 0;
  std::vector<std::uint64_t> counts;    // index i -> p = p_min + i
  std::vector<double> expected;         // shots * P(p)
  double chi_square = 0.0;
  unsigned dof = 0;                     // bins - 1 after merging
  double p_value_bound = 1.0;           // upper-tail chi-square probability
};

// Deterministic for a fixed (shape, shots, seed): shots are drawn in
// fixed-size shards, each from its own counter-derived engine, so the
// result does not depend on thread count or platform.
SampleReport sample_collapse(SystemShape shape, unsigned long long shots,
                             std::uint64_t seed);

// Pearson statistic against expected counts; bins with expected < 5 are
// merged with their neighbor toward the distribution mode.
void chi_square_test(SampleReport& report);

// Upper regularized incomplete gamma Q(a, x); the chi-square upper tail
// is Q(dof / 2, chi2 / 2).
double gamma_q(double a, double x);

}  // namespace rvb
