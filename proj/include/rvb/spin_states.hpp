#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvb/algebra.hpp"
#include "rvb/errors.hpp"

namespace rvb {

// Two-row geometry: m_up spins start up (top row, sites 0 .. m_up - 1),
// n_down spins start down (bottom row, sites m_up .. m_up + n_down - 1).
struct SystemShape {
  unsigned m_up = 0;
  unsigned n_down = 0;

  SystemShape(unsigned m, unsigned n) : m_up(m), n_down(n) {}

  unsigned mu() const { return m_up + n_down; }
  double alpha() const;  // n_down / m_up; DomainError when m_up == 0

  // Emitted-photon window: p in [max(0, M - N), M].
  unsigned p_min() const { return m_up > n_down ? m_up - n_down : 0; }
  unsigned p_max() const { return m_up; }

  // Unpaired spins left after p emissions: N - M + 2p (equals 2 S_tot).
  unsigned unpaired_count(unsigned p) const;

  // S_tot of the p-photon sector, (N - M)/2 + p.
  HalfInteger sector_spin(unsigned p) const;

  bool operator==(const SystemShape&) const = default;
};

// Dense real state vector over the 2^mu spin-z basis. Basis index is a
// bitmask with bit i = site i and set bit meaning spin up. Requires
// mu <= 20 (CapacityError beyond).
struct StateVector {
  SystemShape shape;
  std::vector<double> amp;

  explicit StateVector(SystemShape s);

  std::size_t dim() const { return amp.size(); }
  double norm() const;
  void normalize();  // DomainError on (numerically) zero vector
};

// Printed site-0-first: "10" is site 0 up, site 1 down.
std::string basis_label(std::uint32_t mask, unsigned mu);
std::uint32_t basis_mask(const std::string& label);  // inverse of basis_label

double dot(const StateVector& a, const StateVector& b);

// |up...up, down...down>: every top-row spin up, every bottom-row spin down.
StateVector product_state(SystemShape shape);

// Total spin lowering/raising operators, sum over all sites.
StateVector apply_lowering(const StateVector& v);
StateVector apply_raising(const StateVector& v);

// Total-spin Casimir S^2 = S^- S^+ + S_z (S_z + 1), built from the
// ladder operators above.
StateVector apply_s_squared(const StateVector& v);

// m_tot when v is an S_z eigenstate within tol, otherwise nullopt.
std::optional<HalfInteger> definite_m_tot(const StateVector& v, double tol = 1e-12);

// Projection onto the total-spin-S sector via the polynomial projector
// prod_{S' != S} (S^2 - S'(S'+1)) / (S(S+1) - S'(S'+1)), S' running over
// the spins compatible with the state's definite m_tot. The result keeps
// the sector's weight: its squared norm is the probability of outcome S.
// DomainError when S is outside [|m_tot|, mu/2] or has wrong parity;
// ContractViolation when v has no definite m_tot.
StateVector project_sector(const StateVector& v, HalfInteger s_tot);

// State after observing p emitted photons, starting from product_state:
// project onto S_tot = (N - M)/2 + p, lower p times, normalize.
// Also returns the sector weight (norm^2 of the projection) when asked.
StateVector collapsed_state(SystemShape shape, unsigned p,
                            double* sector_weight = nullptr);

// Closed-form two-row RVB state with M - p dimers and N - M + 2p unpaired
// bottom spins, built directly in the S_z basis. Equals collapsed_state.
StateVector rvb_state(SystemShape shape, unsigned p);

// Symmetric row product state |M/2, M/2 - lambda>_t (x) |N/2, lambda - p - N/2>_b:
// equal amplitudes on masks with lambda top-row downs and lambda - p
// bottom-row ups.
StateVector dicke_product_state(SystemShape shape, unsigned lambda, unsigned p);

// Schmidt decomposition of an in-row-symmetric state against the row
// Dicke product basis.
struct RowSchmidt {
  unsigned p = 0;                    // photon index inferred from m_tot
  unsigned lambda_min = 0;           // = p
  std::vector<double> coefficients;  // index lambda - lambda_min
};
RowSchmidt row_schmidt(const StateVector& v, double tol = 1e-9);

// <S_i . S_j> for i != j (DomainError otherwise).
double spin_correlation(const StateVector& v, unsigned site_i, unsigned site_j);

StateVector swap_sites(const StateVector& v, unsigned site_i, unsigned site_j);

// Invariance under permutations within each row, checked on adjacent
// transpositions.
bool is_in_row_symmetric(const StateVector& v, double tol = 1e-9);

enum class PhaseRelation { equal_same_sign, equal_opposite_sign, different };

// Compares normalized amplitude patterns, reading both signs at a shared
// reference entry (the first state's largest-magnitude amplitude).
PhaseRelation states_equal_up_to_phase(const StateVector& a,
                                       const StateVector& b, double tol = 1e-9);

}  // namespace rvb
