#include "rvb/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "rvb/algebra.hpp"
#include "rvb/collapse.hpp"
#include "rvb/emission.hpp"
#include "rvb/spin_states.hpp"

namespace rvb::verify {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string shape_tag(unsigned m, unsigned n, unsigned p) {
  return "(M=" + std::to_string(m) + ", N=" + std::to_string(n) +
         ", p=" + std::to_string(p) + ")";
}

StageResult fail(std::string name, std::string detail, double dev = 0.0) {
  return {std::move(name), false, std::move(detail), dev};
}

StageResult pass(std::string name, std::string detail, double dev = 0.0) {
  return {std::move(name), true, std::move(detail), dev};
}

// Least-squares slope of ln(y) against ln(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

bool Report::all_passed() const {
  return std::all_of(stages.begin(), stages.end(),
                     [](const StageResult& s) { return s.passed; });
}

StageResult check_collapse_rvb_equivalence(unsigned max_mu, double tol) {
  const std::string name = "collapse_rvb_equivalence";
  const auto start = Clock::now();
  unsigned states = 0;
  double max_dev = 0.0;
  for (unsigned mu = 0; mu <= max_mu; ++mu) {
    for (unsigned m = 0; m <= mu; ++m) {
      const SystemShape shape(m, mu - m);
      for (unsigned p = shape.p_min(); p <= shape.p_max(); ++p) {
        const StateVector a = collapsed_state(shape, p);
        const StateVector b = rvb_state(shape, p);
        if (states_equal_up_to_phase(a, b, tol) != PhaseRelation::equal_same_sign)
          return fail(name, "states differ at " + shape_tag(m, mu - m, p));
        for (std::size_t i = 0; i < a.amp.size(); ++i)
          max_dev = std::max(max_dev, std::abs(a.amp[i] - b.amp[i]));
        ++states;
      }
    }
  }
  std::ostringstream os;
  os << states << " states up to mu = " << max_mu << " identical, max |diff| = "
     << max_dev << ", " << elapsed_ms(start) << " ms";
  return pass(name, os.str(), max_dev);
}

StageResult check_row_schmidt_vs_e_lambda(unsigned max_mn, double tol,
                                          bool flip_sign) {
  const std::string name = "row_schmidt_vs_e_lambda";
  const auto start = Clock::now();
  unsigned coeffs = 0;
  double max_dev = 0.0;
  for (unsigned m = 0; m <= max_mn; ++m) {
    for (unsigned n = 0; n <= max_mn; ++n) {
      const SystemShape shape(m, n);
      for (unsigned p = shape.p_min(); p <= shape.p_max(); ++p) {
        const StateVector v = collapsed_state(shape, p);
        const RowSchmidt rs = row_schmidt(v, tol);
        if (rs.p != p)
          return fail(name, "wrong inferred p at " + shape_tag(m, n, p));
        const unsigned lambda_max = std::min(m, n + p);
        if (rs.coefficients.size() != lambda_max - p + 1)
          return fail(name, "wrong coefficient count at " + shape_tag(m, n, p));
        for (unsigned lambda = p; lambda <= lambda_max; ++lambda) {
          double expect = e_lambda(m, n, p, lambda).to_double();
          if (flip_sign) expect = -expect;
          const double got = rs.coefficients[lambda - p];
          const double dev = std::abs(got - expect);
          max_dev = std::max(max_dev, dev);
          if (dev > tol) {
            std::ostringstream os;
            os << "coefficient mismatch at " << shape_tag(m, n, p)
               << " lambda = " << lambda << ": schmidt = " << got
               << ", closed form = " << expect;
            return fail(name, os.str(), dev);
          }
          ++coeffs;
        }
      }
    }
  }
  std::ostringstream os;
  os << coeffs << " coefficients up to M, N = " << max_mn
     << " agree, max |diff| = " << max_dev << ", " << elapsed_ms(start) << " ms";
  return pass(name, os.str(), max_dev);
}

StageResult check_e_lambda_vs_cg(unsigned max_mn, bool flip_sign) {
  const std::string name = "e_lambda_vs_cg";
  const auto start = Clock::now();
  unsigned coeffs = 0;
  std::set<int> global_signs;
  for (unsigned m = 0; m <= max_mn; ++m) {
    for (unsigned n = 0; n <= max_mn; ++n) {
      const SystemShape shape(m, n);
      for (unsigned p = shape.p_min(); p <= shape.p_max(); ++p) {
        int tuple_sign = 0;
        const unsigned lambda_max = std::min(m, n + p);
        for (unsigned lambda = p; lambda <= lambda_max; ++lambda) {
          SqrtRational e = e_lambda(m, n, p, lambda);
          if (flip_sign) e = -e;
          // Row coupling: j1 = M/2 with m1 = M/2 - lambda, j2 = N/2 with
          // m2 = lambda - N/2 - p, coupled to J = (N - M)/2 + p.
          const int im = static_cast<int>(m), in = static_cast<int>(n);
          const int il = static_cast<int>(lambda), ip = static_cast<int>(p);
          const SqrtRational c = cg_general(
              HalfInteger::from_twice(im), HalfInteger::from_twice(im - 2 * il),
              HalfInteger::from_twice(in), HalfInteger::from_twice(2 * il - in - 2 * ip),
              HalfInteger::from_twice(in - im + 2 * ip),
              HalfInteger::from_twice(im - in - 2 * ip));
          if (e.radicand() != c.radicand())
            return fail(name, "radicand mismatch at " + shape_tag(m, n, p) +
                                  " lambda = " + std::to_string(lambda));
          if (e.sign() == 0 || c.sign() == 0) {
            if (e.sign() != c.sign())
              return fail(name, "zero/nonzero mismatch at " + shape_tag(m, n, p) +
                                    " lambda = " + std::to_string(lambda));
            continue;
          }
          const int ratio = e.sign() * c.sign();
          if (tuple_sign == 0) tuple_sign = ratio;
          else if (tuple_sign != ratio)
            return fail(name, "sign not constant within " + shape_tag(m, n, p));
          ++coeffs;
        }
        if (tuple_sign != 0) global_signs.insert(tuple_sign);
      }
    }
  }
  if (global_signs.size() > 1)
    return fail(name, "per-tuple global sign is not the same across tuples");
  if (!global_signs.empty() && *global_signs.begin() != 1)
    return fail(name, "overlap amplitudes are the negated coupling coefficients");
  std::ostringstream os;
  os << coeffs << " coefficients up to M, N = " << max_mn
     << " equal the coupling coefficients exactly, sign included, "
     << elapsed_ms(start) << " ms";
  return pass(name, os.str());
}

StageResult check_triple_oracle(unsigned max_mu, double tol) {
  const std::string name = "triple_oracle";
  if (max_mu > 14)
    throw CapacityError("check_triple_oracle: dense diagonalization capped at mu = 14");
  const auto start = Clock::now();
  unsigned sectors = 0;
  double max_dev = 0.0;
  for (unsigned mu = 0; mu <= max_mu; ++mu) {
    for (unsigned m = 0; m <= mu; ++m) {
      const SystemShape shape(m, mu - m);
      const EmissionDistribution dist = emission_distribution(m, mu - m);
      const auto brute = brute_force_sector_weights(shape);
      for (unsigned p = shape.p_min(); p <= shape.p_max(); ++p) {
        const double exact = to_double(dist.prob(p));
        double lowdin = 0.0;
        collapsed_state(shape, p, &lowdin);
        const HalfInteger s = shape.sector_spin(p);
        double brute_w = 0.0;
        for (const auto& [sector, w] : brute)
          if (sector == s) brute_w = w;
        const double dev =
            std::max(std::abs(lowdin - exact), std::abs(brute_w - exact));
        max_dev = std::max(max_dev, dev);
        if (dev > tol) {
          std::ostringstream os;
          os << "weights disagree at " << shape_tag(m, mu - m, p)
             << ": exact = " << exact << ", projector = " << lowdin
             << ", dense = " << brute_w;
          return fail(name, os.str(), dev);
        }
        ++sectors;
      }
    }
  }
  std::ostringstream os;
  os << sectors << " sector weights up to mu = " << max_mu
     << " agree three ways, max |diff| = " << max_dev << ", "
     << elapsed_ms(start) << " ms";
  return pass(name, os.str(), max_dev);
}

namespace {

std::vector<unsigned> spot_grid(unsigned max_mn) {
  const unsigned raw[] = {0, 1, 2, 3, 4, 6, 8, 12, 17, 25, 37,
                          55, 80, 120, 180, 270, 400, 500};
  std::vector<unsigned> g;
  for (unsigned v : raw)
    if (v <= max_mn) g.push_back(v);
  if (g.empty() || g.back() != max_mn) g.push_back(max_mn);
  return g;
}

}  // namespace

StageResult check_exact_normalization(unsigned max_mn) {
  const std::string name = "exact_normalization";
  const auto start = Clock::now();
  const std::vector<unsigned> grid = spot_grid(max_mn);
  unsigned pairs = 0;
  for (unsigned m : grid) {
    for (unsigned n : grid) {
      const EmissionDistribution dist = emission_distribution(m, n);
      BigRational sum = 0;
      for (const auto& q : dist.probs) {
        if (q <= 0)
          return fail(name, "nonpositive probability at M = " + std::to_string(m) +
                                ", N = " + std::to_string(n));
        sum += q;
      }
      if (sum != 1)
        return fail(name, "sum != 1 at M = " + std::to_string(m) +
                              ", N = " + std::to_string(n));
      ++pairs;
    }
  }
  std::ostringstream os;
  os << pairs << " distributions up to M, N = " << max_mn
     << " sum to 1 exactly, " << elapsed_ms(start) << " ms";
  return pass(name, os.str());
}

StageResult check_endpoint_identities(unsigned max_mn) {
  const std::string name = "endpoint_identities";
  const auto start = Clock::now();
  unsigned checks = 0;
  for (unsigned m = 0; m <= max_mn; ++m) {
    for (unsigned n = 0; n <= max_mn; ++n) {
      if (m <= n) {
        const BigRational lhs = emission_probability(m, n, 0);
        const BigRational rhs(static_cast<long long>(n) - m + 1,
                              static_cast<long long>(n) + 1);
        if (lhs != rhs)
          return fail(name, "P(0) identity fails at M = " + std::to_string(m) +
                                ", N = " + std::to_string(n));
        ++checks;
      }
      const BigRational lhs = emission_probability(m, n, m);
      const BigRational rhs(BigInt(1), binomial_exact(m + n, m));
      if (lhs != rhs)
        return fail(name, "P(M) identity fails at M = " + std::to_string(m) +
                              ", N = " + std::to_string(n));
      ++checks;
    }
  }
  std::ostringstream os;
  os << checks << " endpoint identities up to M, N = " << max_mn
     << " hold exactly, " << elapsed_ms(start) << " ms";
  return pass(name, os.str());
}

StageResult check_stirling_ratio(unsigned max_m) {
  const std::string name = "stirling_ratio";
  const auto start = Clock::now();
  double prev = 0.0;
  bool first = true;
  for (unsigned m = 50; m <= max_m; m += 10) {
    // -log2 P_{N=M}(M) / (2M) with P = 1 / C(2M, M)
    const double ln_c = ln_factorial(2 * m) - 2.0 * ln_factorial(m);
    const double r = ln_c / (2.0 * m * std::log(2.0));
    if (r >= 1.0)
      return fail(name, "ratio not below 1 at M = " + std::to_string(m));
    if (!first && r <= prev)
      return fail(name, "ratio not increasing at M = " + std::to_string(m));
    prev = r;
    first = false;
  }
  std::ostringstream os;
  os << "-log2 P_{N=M}(M) / (2M) climbs monotonically to " << prev
     << " at M = " << max_m << ", " << elapsed_ms(start) << " ms";
  return pass(name, os.str(), 1.0 - prev);
}

StageResult check_scaling_laws() {
  const std::string name = "scaling_laws";
  const auto start = Clock::now();
  const std::vector<double> ms = {100, 200, 400, 800};

  std::vector<double> var_at_one, mean_at_one, var_above, var_below;
  for (double md : ms) {
    const auto m = static_cast<unsigned>(md);
    var_at_one.push_back(variance_gamma(m, m));
    mean_at_one.push_back(mean_gamma(m, m));
    var_above.push_back(variance_gamma(m, 2 * m));
    var_below.push_back(variance_gamma(m, m / 2));
  }
  const double s_var_one = log_log_slope(ms, var_at_one);
  const double s_mean_one = log_log_slope(ms, mean_at_one);
  const double s_var_above = log_log_slope(ms, var_above);
  const double s_var_below = log_log_slope(ms, var_below);

  std::ostringstream os;
  os << "slopes: Var(gamma)|alpha=1 " << s_var_one << " (want -1 +/- 0.05), "
     << "mean(gamma)|alpha=1 " << s_mean_one << " (want -0.5 +/- 0.05), "
     << "Var(gamma)|alpha=2 " << s_var_above << ", Var(gamma)|alpha=1/2 "
     << s_var_below << " (want -2 +/- 0.1)";

  if (std::abs(s_var_one + 1.0) > 0.05 || std::abs(s_mean_one + 0.5) > 0.05 ||
      std::abs(s_var_above + 2.0) > 0.1 || std::abs(s_var_below + 2.0) > 0.1)
    return fail(name, os.str());

  const std::vector<BigRational> alphas = {BigRational(1, 4), BigRational(1, 2),
                                           BigRational(1), BigRational(3, 2),
                                           BigRational(2)};
  double max_gap = 0.0;
  for (const auto& alpha : alphas) {
    const SweepPoint pt = sweep_point(800, alpha);
    const double gap = std::abs(pt.gamma_bar - extrapolate_thermo(to_double(alpha)));
    max_gap = std::max(max_gap, gap);
    if (gap > 0.05) {
      std::ostringstream bad;
      bad << "thermodynamic gap " << gap << " at alpha = " << rational_string(alpha)
          << " exceeds 0.05";
      return fail(name, bad.str(), gap);
    }
  }
  os << "; thermodynamic gap at M = 800 <= " << max_gap << ", "
     << elapsed_ms(start) << " ms";
  return pass(name, os.str(), max_gap);
}

Report run_verification(const Options& options) {
  if (options.max_mu > 14)
    throw CapacityError("run_verification: max_mu capped at 14 by the dense oracle");
  Report rep;
  rep.options = options;
  rep.stages.push_back(check_collapse_rvb_equivalence(options.max_mu, options.tol));
  rep.stages.push_back(check_row_schmidt_vs_e_lambda(8, options.tol,
                                                     options.flip_e_lambda_sign));
  rep.stages.push_back(check_e_lambda_vs_cg(8, options.flip_e_lambda_sign));
  rep.stages.push_back(check_triple_oracle(std::min(options.max_mu, 14u), options.tol));
  rep.stages.push_back(check_exact_normalization(500));
  rep.stages.push_back(check_endpoint_identities(200));
  rep.stages.push_back(check_stirling_ratio(500));
  rep.stages.push_back(check_scaling_laws());
  return rep;
}

}  // namespace rvb::verify
