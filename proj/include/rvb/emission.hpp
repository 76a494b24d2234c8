#pragma once

#include <vector>

#include "rvb/algebra.hpp"
#include "rvb/errors.hpp"

namespace rvb {

// Exact probability of observing p emitted photons from the (M up, N down)
// initial product state:
//   P(p) = M! N! (N - M + 2p + 1) / ((M - p)! (N + p + 1)!).
// Valid for max(0, M - N) <= p <= M; DomainError outside.
BigRational emission_probability(unsigned m_up, unsigned n_down, unsigned p);

// Same quantity through the ln-factorial path; usable far beyond the
// exact-arithmetic comfort zone.
double emission_probability_float(unsigned m_up, unsigned n_down, unsigned p);

// Full exact distribution over the emission window.
struct EmissionDistribution {
  unsigned m_up = 0;
  unsigned n_down = 0;
  unsigned p_min = 0;
  std::vector<BigRational> probs;  // index i -> p = p_min + i

  unsigned p_max() const { return p_min + static_cast<unsigned>(probs.size()) - 1; }
  const BigRational& prob(unsigned p) const;  // DomainError outside window
  double gamma(unsigned p) const;             // p / M (0 when M == 0)
};

EmissionDistribution emission_distribution(unsigned m_up, unsigned n_down);

// Exact first and second central moments of the photon count p.
struct EmissionMoments {
  BigRational mean_p;
  BigRational var_p;
};
EmissionMoments emission_moments(unsigned m_up, unsigned n_down);

// Moments of the emission fraction gamma = p / M. Require m_up > 0.
double mean_gamma(unsigned m_up, unsigned n_down);
double variance_gamma(unsigned m_up, unsigned n_down);

// Statistics of the unpaired-spin count q = N - M + 2p left after collapse.
struct SpinonStats {
  double q_bar = 0.0;
  double q_var = 0.0;
  double mean_var_ratio = 0.0;  // q_bar / q_var; +inf when q_var == 0
};
SpinonStats spinon_stats(unsigned m_up, unsigned n_down);

// Imbalance regimes of alpha = N / M.
enum class Regime { alpha_above_one, alpha_at_one, alpha_below_one };
Regime classify_regime(double alpha);

// Large-M closed forms approximating the per-count probability P(p) at
// gamma = p / M, near gamma ~ 0 resp. gamma ~ gamma_c = 1 - alpha:
//   alpha > 1 : (alpha - 1) exp(-M (alpha - 1) gamma)
//   alpha = 1 : 2 gamma / (1 + gamma) exp(-M gamma^2)
//   alpha < 1 : gamma_c exp(-2 M gamma_c^2) exp(-3 M gamma_c (gamma - gamma_c)),
//               identically zero for gamma < gamma_c.
// DomainError when the regime tag contradicts alpha, gamma is outside [0, 1],
// or M == 0.
double approx_distribution(Regime regime, unsigned m_up, double alpha,
                           double gamma);

// Peak position sqrt(1 / (2M)) of the balanced-case form above.
double approx_peak_location(unsigned m_up);

struct AsymptoticCurve {
  Regime regime = Regime::alpha_at_one;
  unsigned m_up = 0;
  double alpha = 1.0;
  double gamma_c = 0.0;  // max(0, 1 - alpha)

  double evaluate(double gamma) const;
};
AsymptoticCurve make_asymptotic_curve(unsigned m_up, double alpha);

// One row of an alpha sweep at fixed M. All statistics derive from the
// exact distribution; alpha is kept as the exact ratio n_down / m_up.
struct SweepPoint {
  BigRational alpha;
  unsigned m_up = 0;
  unsigned n_down = 0;
  double gamma_bar = 0.0;
  double m_times_var_gamma = 0.0;  // M * Var(gamma)
  double q_bar = 0.0;
  double q_var = 0.0;
  double mean_var_ratio = 0.0;  // +inf when q_var == 0
};

// alpha * m_up must reduce to an integer (DomainError otherwise).
SweepPoint sweep_point(unsigned m_up, const BigRational& alpha);
std::vector<SweepPoint> sweep_alpha(unsigned m_up,
                                    const std::vector<BigRational>& alphas);

// Thermodynamic-limit mean emission fraction: 1 - alpha below the
// transition, 0 at and above it.
double extrapolate_thermo(double alpha);

}  // namespace rvb
