#include "rvb/collapse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

namespace rvb {

namespace {

unsigned popcount32(std::uint32_t x) { return static_cast<unsigned>(std::popcount(x)); }

// Twice the total spin recovered from an S^2 expectation value.
int twice_spin_from_casimir(double s_squared) {
  return static_cast<int>(std::lround(std::sqrt(4.0 * s_squared + 1.0) - 1.0));
}

}  // namespace

CollapseEnsemble mixed_state_ensemble(SystemShape shape) {
  CollapseEnsemble ens{shape, {}};
  const EmissionDistribution dist = emission_distribution(shape.m_up, shape.n_down);
  ens.outcomes.reserve(dist.probs.size());
  for (unsigned p = dist.p_min; p <= dist.p_max(); ++p) {
    CollapseOutcome out{p, to_double(dist.prob(p)), 0, collapsed_state(shape, p)};
    const double s2 = dot(out.state, apply_s_squared(out.state));
    const int ts = twice_spin_from_casimir(s2);
    if (ts < 0 || static_cast<unsigned>(ts) != shape.unpaired_count(p))
      throw ContractViolation("mixed_state_ensemble: measured S_tot disagrees with sector");
    out.unpaired = static_cast<unsigned>(ts);
    ens.outcomes.push_back(std::move(out));
  }
  return ens;
}

double ensemble_observable(const CollapseEnsemble& ens, const Observable& obs) {
  double acc = 0.0;
  for (const auto& out : ens.outcomes) {
    double value = 0.0;
    switch (obs.kind) {
      case Observable::Kind::spin_correlation:
        value = spin_correlation(out.state, obs.site_i, obs.site_j);
        break;
      case Observable::Kind::s_tot_z: {
        const auto m = definite_m_tot(out.state);
        if (!m) throw ContractViolation("ensemble_observable: branch lacks definite m_tot");
        value = m->value();
        break;
      }
      case Observable::Kind::unpaired_count:
        value = out.unpaired;
        break;
    }
    acc += out.probability * value;
  }
  return acc;
}

std::vector<std::pair<HalfInteger, double>> brute_force_sector_weights(
    SystemShape shape) {
  const unsigned mu = shape.mu();
  if (mu > 14)
    throw CapacityError("brute_force_sector_weights capped at 14 spins, got mu = " +
                        std::to_string(mu));
  const unsigned M = shape.m_up;
  const std::uint32_t init = M == 0 ? 0u : ((1u << M) - 1u);

  std::vector<std::uint32_t> basis;
  std::vector<std::int32_t> pos(std::size_t{1} << mu, -1);
  for (std::uint32_t b = 0; b < (1u << mu); ++b) {
    if (popcount32(b) == M) {
      pos[b] = static_cast<std::int32_t>(basis.size());
      basis.push_back(b);
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());

  const int tm = static_cast<int>(M) - static_cast<int>(shape.n_down);
  const double diag_const = tm * (tm + 2) / 4.0 + shape.n_down;
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const std::uint32_t b = basis[static_cast<std::size_t>(a)];
    s2(a, a) = diag_const;
    for (unsigned i = 0; i < mu; ++i) {
      if (!((b >> i) & 1u)) continue;
      for (unsigned j = 0; j < mu; ++j) {
        if ((b >> j) & 1u) continue;
        const std::uint32_t partner = b ^ ((1u << i) | (1u << j));
        s2(a, pos[partner]) += 1.0;
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s2);
  if (solver.info() != Eigen::Success)
    throw ContractViolation("brute_force_sector_weights: eigensolver failed");

  std::map<int, double> by_sector;
  const Eigen::Index i0 = pos[init];
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double w = solver.eigenvectors()(i0, k) * solver.eigenvectors()(i0, k);
    const int ts = twice_spin_from_casimir(solver.eigenvalues()(k));
    by_sector[ts] += w;
  }

  std::vector<std::pair<HalfInteger, double>> out;
  out.reserve(by_sector.size());
  for (const auto& [ts, w] : by_sector)
    out.emplace_back(HalfInteger::from_twice(ts), w);
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr unsigned long long kShardSize = 1u << 16;

}  // namespace

SampleReport sample_collapse(SystemShape shape, unsigned long long shots,
                             std::uint64_t seed) {
  if (shots == 0) throw DomainError("sample_collapse: shots must be positive");
  const EmissionDistribution dist = emission_distribution(shape.m_up, shape.n_down);
  const std::size_t nbins = dist.probs.size();

  std::vector<double> cdf(nbins);
  double run = 0.0;
  for (std::size_t i = 0; i < nbins; ++i) {
    run += to_double(dist.probs[i]);
    cdf[i] = run;
  }
  cdf.back() = 1.0;

  SampleReport rep;
  rep.m_up = shape.m_up;
  rep.n_down = shape.n_down;
  rep.shots = shots;
  rep.seed = seed;
  rep.p_min = dist.p_min;
  rep.counts.assign(nbins, 0);
  rep.expected.resize(nbins);
  for (std::size_t i = 0; i < nbins; ++i)
    rep.expected[i] = static_cast<double>(shots) * to_double(dist.probs[i]);

  for (unsigned long long first = 0; first < shots; first += kShardSize) {
    const unsigned long long n = std::min(kShardSize, shots - first);
    std::mt19937_64 eng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (first / kShardSize + 1)));
    for (unsigned long long k = 0; k < n; ++k) {
      const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const std::size_t idx = std::min<std::size_t>(
          static_cast<std::size_t>(it - cdf.begin()), nbins - 1);
      ++rep.counts[idx];
    }
  }

  chi_square_test(rep);
  return rep;
}

void chi_square_test(SampleReport& report) {
  std::vector<double> exp_b(report.expected);
  std::vector<double> obs_b(report.counts.begin(), report.counts.end());

  while (exp_b.size() > 1) {
    const std::size_t mode = static_cast<std::size_t>(
        std::max_element(exp_b.begin(), exp_b.end()) - exp_b.begin());
    std::size_t f = exp_b.size();
    for (std::size_t i = 0; i < exp_b.size(); ++i) {
      if (exp_b[i] < 5.0) { f = i; break; }
    }
    if (f == exp_b.size()) break;
    std::size_t into;
    if (f < mode) into = f + 1;
    else if (f > mode) into = f - 1;
    else into = (f == 0) ? 1 : (f + 1 == exp_b.size() ? f - 1
                : (exp_b[f - 1] >= exp_b[f + 1] ? f - 1 : f + 1));
    exp_b[into] += exp_b[f];
    obs_b[into] += obs_b[f];
    exp_b.erase(exp_b.begin() + static_cast<std::ptrdiff_t>(f));
    obs_b.erase(obs_b.begin() + static_cast<std::ptrdiff_t>(f));
  }

  if (exp_b.size() < 2) {
    report.chi_square = 0.0;
    report.dof = 0;
    report.p_value_bound = 1.0;
    return;
  }
  double chi = 0.0;
  for (std::size_t i = 0; i < exp_b.size(); ++i) {
    const double d = obs_b[i] - exp_b[i];
    chi += d * d / exp_b[i];
  }
  report.chi_square = chi;
  report.dof = static_cast<unsigned>(exp_b.size() - 1);
  report.p_value_bound = gamma_q(report.dof / 2.0, chi / 2.0);
}

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw DomainError("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  const double ln_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // lower series: P(a, x) = sum_n x^n Gamma(a) / Gamma(a + 1 + n)
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 2000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(ln_front);
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 2000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(ln_front) * h;
}

}  // namespace rvb
