#include "rvb/spin_states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace rvb {

namespace {

constexpr unsigned kMaxSpins = 20;

unsigned popcount32(std::uint32_t x) { return static_cast<unsigned>(std::popcount(x)); }

void check_photon_window(const SystemShape& s, unsigned p, const char* who) {
  if (p < s.p_min() || p > s.p_max())
    throw DomainError(std::string(who) + ": p = " + std::to_string(p) +
                      " outside [" + std::to_string(s.p_min()) + ", " +
                      std::to_string(s.p_max()) + "]");
}

double max_abs(const StateVector& v) {
  double m = 0.0;
  for (double a : v.amp) m = std::max(m, std::abs(a));
  return m;
}

}  // namespace

double SystemShape::alpha() const {
  if (m_up == 0) throw DomainError("alpha undefined for m_up == 0");
  return static_cast<double>(n_down) / static_cast<double>(m_up);
}

unsigned SystemShape::unpaired_count(unsigned p) const {
  check_photon_window(*this, p, "unpaired_count");
  return n_down - m_up + 2 * p;
}

HalfInteger SystemShape::sector_spin(unsigned p) const {
  check_photon_window(*this, p, "sector_spin");
  return HalfInteger::from_twice(static_cast<int>(n_down) -
                                 static_cast<int>(m_up) + 2 * static_cast<int>(p));
}

StateVector::StateVector(SystemShape s) : shape(s) {
  if (s.mu() > kMaxSpins)
    throw CapacityError("state vectors are capped at " + std::to_string(kMaxSpins) +
                        " spins, requested mu = " + std::to_string(s.mu()));
  amp.assign(std::size_t{1} << s.mu(), 0.0);
}

double StateVector::norm() const { return std::sqrt(dot(*this, *this)); }

void StateVector::normalize() {
  const double n = norm();
  if (n < 1e-150) throw DomainError("cannot normalize a zero state vector");
  for (double& a : amp) a /= n;
}

std::string basis_label(std::uint32_t mask, unsigned mu) {
  std::string s(mu, '0');
  for (unsigned i = 0; i < mu; ++i)
    if ((mask >> i) & 1u) s[i] = '1';
  return s;
}

std::uint32_t basis_mask(const std::string& label) {
  if (label.size() > kMaxSpins) throw DomainError("basis label longer than 20 sites");
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == '1') mask |= (1u << i);
    else if (label[i] != '0') throw DomainError("basis label must be 0/1 only");
  }
  return mask;
}

double dot(const StateVector& a, const StateVector& b) {
  if (a.shape != b.shape) throw DomainError("dot: mismatched shapes");
  double s = 0.0;
  for (std::size_t i = 0; i < a.amp.size(); ++i) s += a.amp[i] * b.amp[i];
  return s;
}

StateVector product_state(SystemShape shape) {
  StateVector v(shape);
  const std::uint32_t mask = shape.m_up == 0 ? 0u : ((1u << shape.m_up) - 1u);
  v.amp[mask] = 1.0;
  return v;
}

StateVector apply_lowering(const StateVector& v) {
  StateVector out(v.shape);
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    const double a = v.amp[b];
    if (a == 0.0) continue;
    for (std::uint32_t bits = static_cast<std::uint32_t>(b); bits; bits &= bits - 1) {
      const std::uint32_t low = bits & (~bits + 1u);
      out.amp[b ^ low] += a;
    }
  }
  return out;
}

StateVector apply_raising(const StateVector& v) {
  const unsigned mu = v.shape.mu();
  StateVector out(v.shape);
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    const double a = v.amp[b];
    if (a == 0.0) continue;
    for (unsigned i = 0; i < mu; ++i) {
      const std::uint32_t bit = 1u << i;
      if (!(b & bit)) out.amp[b | bit] += a;
    }
  }
  return out;
}

StateVector apply_s_squared(const StateVector& v) {
  const int mu = static_cast<int>(v.shape.mu());
  StateVector out = apply_lowering(apply_raising(v));
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    if (v.amp[b] == 0.0) continue;
    const int tm = 2 * static_cast<int>(popcount32(static_cast<std::uint32_t>(b))) - mu;
    out.amp[b] += v.amp[b] * (tm * (tm + 2) / 4.0);
  }
  return out;
}

std::optional<HalfInteger> definite_m_tot(const StateVector& v, double tol) {
  const double scale = max_abs(v);
  if (scale == 0.0) return std::nullopt;
  int found = -1;
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    if (std::abs(v.amp[b]) <= tol * scale) continue;
    const int pc = static_cast<int>(popcount32(static_cast<std::uint32_t>(b)));
    if (found < 0) found = pc;
    else if (found != pc) return std::nullopt;
  }
  return HalfInteger::from_twice(2 * found - static_cast<int>(v.shape.mu()));
}

StateVector project_sector(const StateVector& v, HalfInteger s_tot) {
  const auto m = definite_m_tot(v);
  if (!m) throw ContractViolation("project_sector requires a definite m_tot");
  const int tm = std::abs(m->twice());
  const int ts = s_tot.twice();
  const int mu = static_cast<int>(v.shape.mu());
  if (ts < tm || ts > mu || (ts - tm) % 2 != 0)
    throw DomainError("project_sector: S outside [|m_tot|, mu/2] or parity mismatch");

  StateVector w = v;
  const double target = ts * (ts + 2) / 4.0;
  for (int tsp = tm; tsp <= mu; tsp += 2) {
    if (tsp == ts) continue;
    const double c = tsp * (tsp + 2) / 4.0;
    const StateVector s2 = apply_s_squared(w);
    const double inv = 1.0 / (target - c);
    for (std::size_t b = 0; b < w.amp.size(); ++b)
      w.amp[b] = (s2.amp[b] - c * w.amp[b]) * inv;
  }
  return w;
}

namespace {

// Largest residual of (S^2 - S(S+1)) v, scaled to the state's magnitude.
double sector_residual(const StateVector& v, HalfInteger s_tot) {
  const StateVector s2 = apply_s_squared(v);
  const double target = s_tot.twice() * (s_tot.twice() + 2) / 4.0;
  double res = 0.0;
  for (std::size_t b = 0; b < v.amp.size(); ++b)
    res = std::max(res, std::abs(s2.amp[b] - target * v.amp[b]));
  const double scale = std::max(1.0, max_abs(v));
  return res / scale;
}

}  // namespace

StateVector collapsed_state(SystemShape shape, unsigned p, double* sector_weight) {
  check_photon_window(shape, p, "collapsed_state");
  const HalfInteger s = shape.sector_spin(p);
  StateVector v = project_sector(product_state(shape), s);
  const double weight = dot(v, v);
  if (sector_weight) *sector_weight = weight;
  for (unsigned k = 0; k < p; ++k) v = apply_lowering(v);
  v.normalize();

  if (sector_residual(v, s) > 1e-9)
    throw ContractViolation("collapsed_state: S^2 residual exceeds 1e-9");
  const auto m = definite_m_tot(v);
  if (!m || m->twice() != -s.twice())
    throw ContractViolation("collapsed_state: final m_tot != -S");
  return v;
}

StateVector rvb_state(SystemShape shape, unsigned p) {
  check_photon_window(shape, p, "rvb_state");
  const unsigned M = shape.m_up, N = shape.n_down;
  StateVector out(shape);

  const BigRational d2 = delta_norm(M, N, p).squared_signed() *
                         BigRational(BigInt(1) << (M - p));
  const unsigned kappa_max = std::min(M, N + p);
  std::vector<double> coef(kappa_max + 1, 0.0);
  for (unsigned kappa = p; kappa <= kappa_max; ++kappa) {
    const BigInt num = binomial_exact(M - p, static_cast<long long>(kappa) - p) *
                       factorial(M - kappa) * factorial(kappa) *
                       factorial(kappa - p) * factorial(N - kappa + p);
    const double a = std::sqrt(to_double(BigRational(num * num) / d2));
    coef[kappa] = (kappa - p) % 2 == 0 ? a : -a;
  }

  const std::uint32_t top = M == 0 ? 0u : ((1u << M) - 1u);
  for (std::size_t b = 0; b < out.amp.size(); ++b) {
    const std::uint32_t mb = static_cast<std::uint32_t>(b);
    const unsigned kappa = M - popcount32(mb & top);
    if (kappa < p || kappa > kappa_max) continue;
    if (popcount32(mb & ~top) != kappa - p) continue;
    out.amp[b] = coef[kappa];
  }

  if (std::abs(out.norm() - 1.0) > 1e-9)
    throw ContractViolation("rvb_state: closed form is not unit norm");
  out.normalize();
  return out;
}

StateVector dicke_product_state(SystemShape shape, unsigned lambda, unsigned p) {
  check_photon_window(shape, p, "dicke_product_state");
  const unsigned M = shape.m_up, N = shape.n_down;
  if (lambda < p || lambda > M || lambda > N + p)
    throw DomainError("dicke_product_state: lambda outside [p, min(M, N + p)]");
  StateVector v(shape);
  const BigInt count = binomial_exact(M, lambda) * binomial_exact(N, static_cast<long long>(lambda) - p);
  const double a = 1.0 / std::sqrt(to_double(BigRational(count)));
  const std::uint32_t top = M == 0 ? 0u : ((1u << M) - 1u);
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    const std::uint32_t mb = static_cast<std::uint32_t>(b);
    if (M - popcount32(mb & top) != lambda) continue;
    if (popcount32(mb & ~top) != lambda - p) continue;
    v.amp[b] = a;
  }
  return v;
}

RowSchmidt row_schmidt(const StateVector& v, double tol) {
  if (!is_in_row_symmetric(v, tol))
    throw ContractViolation("row_schmidt requires an in-row-symmetric state");
  const auto m = definite_m_tot(v);
  if (!m) throw ContractViolation("row_schmidt requires a definite m_tot");
  const int M = static_cast<int>(v.shape.m_up), N = static_cast<int>(v.shape.n_down);
  const int p2 = M - N - m->twice();
  if (p2 % 2 != 0) throw ContractViolation("row_schmidt: impossible m_tot parity");
  const int p = p2 / 2;
  if (p < static_cast<int>(v.shape.p_min()) || p > static_cast<int>(v.shape.p_max()))
    throw DomainError("row_schmidt: m_tot outside the emission window");

  RowSchmidt r;
  r.p = static_cast<unsigned>(p);
  r.lambda_min = r.p;
  const unsigned lambda_max = std::min(v.shape.m_up, v.shape.n_down + r.p);
  for (unsigned lambda = r.p; lambda <= lambda_max; ++lambda)
    r.coefficients.push_back(dot(dicke_product_state(v.shape, lambda, r.p), v));
  return r;
}

double spin_correlation(const StateVector& v, unsigned site_i, unsigned site_j) {
  const unsigned mu = v.shape.mu();
  if (site_i >= mu || site_j >= mu || site_i == site_j)
    throw DomainError("spin_correlation: sites must be distinct and < mu");
  const double n2 = dot(v, v);
  if (n2 < 1e-300) throw DomainError("spin_correlation of a zero state");
  const std::uint32_t bi = 1u << site_i, bj = 1u << site_j;
  double zz = 0.0, flip = 0.0;
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    const double a = v.amp[b];
    if (a == 0.0) continue;
    const bool ui = b & bi, uj = b & bj;
    zz += (ui == uj ? 0.25 : -0.25) * a * a;
    if (ui != uj) flip += 0.5 * a * v.amp[b ^ (bi | bj)];
  }
  return (zz + flip) / n2;
}

StateVector swap_sites(const StateVector& v, unsigned site_i, unsigned site_j) {
  const unsigned mu = v.shape.mu();
  if (site_i >= mu || site_j >= mu)
    throw DomainError("swap_sites: site index out of range");
  StateVector out(v.shape);
  for (std::size_t b = 0; b < v.amp.size(); ++b) {
    const std::uint32_t x = ((b >> site_i) ^ (b >> site_j)) & 1u;
    const std::size_t sw = b ^ ((x << site_i) | (x << site_j));
    out.amp[sw] = v.amp[b];
  }
  return out;
}

bool is_in_row_symmetric(const StateVector& v, double tol) {
  const double scale = std::max(1.0, max_abs(v));
  const unsigned M = v.shape.m_up, mu = v.shape.mu();
  const auto check_pair = [&](unsigned i, unsigned j) {
    const StateVector sw = swap_sites(v, i, j);
    for (std::size_t b = 0; b < v.amp.size(); ++b)
      if (std::abs(sw.amp[b] - v.amp[b]) > tol * scale) return false;
    return true;
  };
  for (unsigned i = 0; i + 1 < M; ++i)
    if (!check_pair(i, i + 1)) return false;
  for (unsigned i = M; i + 1 < mu; ++i)
    if (!check_pair(i, i + 1)) return false;
  return true;
}

PhaseRelation states_equal_up_to_phase(const StateVector& a,
                                       const StateVector& b, double tol) {
  if (a.shape != b.shape) throw DomainError("states_equal_up_to_phase: mismatched shapes");
  StateVector an = a, bn = b;
  an.normalize();
  bn.normalize();
  // One shared reference entry decides both signs; picking an argmax per
  // state is ambiguous when several entries tie in magnitude.
  std::size_t idx = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < an.amp.size(); ++i) {
    if (std::abs(an.amp[i]) > best) {
      best = std::abs(an.amp[i]);
      idx = i;
    }
  }
  if (std::abs(bn.amp[idx]) <= tol) return PhaseRelation::different;
  const int sa = an.amp[idx] >= 0.0 ? 1 : -1;
  const int sb = bn.amp[idx] >= 0.0 ? 1 : -1;
  for (std::size_t i = 0; i < an.amp.size(); ++i)
    if (std::abs(sa * an.amp[i] - sb * bn.amp[i]) > tol) return PhaseRelation::different;
  return sa == sb ? PhaseRelation::equal_same_sign
                  : PhaseRelation::equal_opposite_sign;
}

}  // namespace rvb
