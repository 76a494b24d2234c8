#pragma once

#include <string>
#include <vector>

namespace rvb::verify {

struct Options {
  unsigned max_mu = 12;  // cap for full state-vector sweeps; at most 14
  double tol = 1e-9;
  // Test hook: negates every e_lambda before comparison, so the suite can
  // confirm these checks actually bite.
  bool flip_e_lambda_sign = false;
};

struct StageResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double max_deviation = 0.0;
};

struct Report {
  Options options;
  std::vector<StageResult> stages;
  bool all_passed() const;
};

// Full cross-validation battery. Throws CapacityError when options.max_mu
// exceeds the dense-diagonalization cap of 14.
Report run_verification(const Options& options);

// Individual stages, also used directly by the test suites.

// collapsed_state == rvb_state (same global sign) over every shape with
// m_up + n_down <= max_mu and every photon count in the window.
StageResult check_collapse_rvb_equivalence(unsigned max_mu, double tol);

// Schmidt coefficients of every collapsed state match the closed-form
// overlap amplitudes, for all m_up, n_down <= max_mn.
StageResult check_row_schmidt_vs_e_lambda(unsigned max_mn, double tol,
                                          bool flip_sign = false);

// Closed-form overlap amplitudes against the general Clebsch-Gordan
// evaluator, exact radicand equality plus one consistent sign per
// (m_up, n_down, p).
StageResult check_e_lambda_vs_cg(unsigned max_mn, bool flip_sign = false);

// Emission probabilities three ways: exact formula, squared norm of the
// polynomial projection, dense-eigendecomposition weights.
StageResult check_triple_oracle(unsigned max_mu, double tol);

// Sum of the exact distribution == 1 as a rational identity on a spot grid
// up to max_mn, every term strictly positive.
StageResult check_exact_normalization(unsigned max_mn);

// Closed-form edge identities P(p_min) and P(M) on all pairs up to max_mn.
StageResult check_endpoint_identities(unsigned max_mn);

// -log2 P_{N=M}(M) / (2M) approaches 1 from below, monotonically.
StageResult check_stirling_ratio(unsigned max_m);

// Log-log slopes of the exact moments against M, plus agreement of the
// finite-size mean with its thermodynamic limit.
StageResult check_scaling_laws();

}  // namespace rvb::verify
