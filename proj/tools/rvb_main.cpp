#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rvb/algebra.hpp"
#include "rvb/collapse.hpp"
#include "rvb/emission.hpp"
#include "rvb/errors.hpp"
#include "rvb/io.hpp"
#include "rvb/spin_states.hpp"
#include "rvb/verify.hpp"

using nlohmann::json;

namespace {

struct OutputOptions {
  std::string format = "csv";
  std::string out_path;  // empty -> stdout
  int precision = 12;
};

void emit(const OutputOptions& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  rvb::io::write_text_atomic(opt.out_path, text);
}

json make_meta(const std::string& command, json parameters) {
  return json{{"command", command},
              {"version", rvb::io::kVersion},
              {"timestamp", rvb::io::timestamp_utc()},
              {"parameters", std::move(parameters)}};
}

json ratio_or_null(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

int cmd_collapse(unsigned m, unsigned n, unsigned p, const OutputOptions& opt) {
  const rvb::SystemShape shape(m, n);
  const rvb::StateVector state = rvb::collapsed_state(shape, p);
  const int twice_s = shape.sector_spin(p).twice();
  const unsigned unpaired = shape.unpaired_count(p);
  const double norm_error = std::abs(state.norm() - 1.0);

  if (opt.format == "csv") {
    std::string text = "basis,amplitude\n";
    for (std::size_t b = 0; b < state.amp.size(); ++b) {
      if (state.amp[b] == 0.0) continue;
      text += rvb::basis_label(static_cast<std::uint32_t>(b), shape.mu());
      text += ',';
      text += rvb::io::format_fixed(state.amp[b], opt.precision);
      text += '\n';
    }
    std::fprintf(stderr, "# m=%u n=%u p=%u\n", m, n, p);
    std::fprintf(stderr, "# twice_s_tot=%d twice_m_tot=%d unpaired=%u\n",
                 twice_s, -twice_s, unpaired);
    std::fprintf(stderr, "# norm_error=%.3e\n", norm_error);
    emit(opt, text);
    return 0;
  }

  json amps = json::array();
  for (std::size_t b = 0; b < state.amp.size(); ++b) {
    if (state.amp[b] == 0.0) continue;
    amps.push_back({{"basis", rvb::basis_label(static_cast<std::uint32_t>(b), shape.mu())},
                    {"amplitude", state.amp[b]}});
  }
  const json doc = {
      {"meta", make_meta("collapse", {{"m", m}, {"n", n}, {"p", p}})},
      {"data",
       {{"m", m},
        {"n", n},
        {"p", p},
        {"twice_s_tot", twice_s},
        {"twice_m_tot", -twice_s},
        {"unpaired", unpaired},
        {"norm_error", norm_error},
        {"amplitudes", std::move(amps)}}}};
  emit(opt, doc.dump(2) + "\n");
  return 0;
}

int cmd_dist(unsigned m, unsigned n, bool density, const OutputOptions& opt) {
  const rvb::EmissionDistribution dist = rvb::emission_distribution(m, n);

  if (opt.format == "csv") {
    std::string text = density ? "p,gamma,prob_exact,prob_float,density\n"
                               : "p,gamma,prob_exact,prob_float\n";
    for (unsigned p = dist.p_min; p <= dist.p_max(); ++p) {
      const double pf = rvb::to_double(dist.prob(p));
      text += std::to_string(p);
      text += ',';
      text += rvb::io::format_fixed(dist.gamma(p), opt.precision);
      text += ',';
      text += rvb::rational_string(dist.prob(p));
      text += ',';
      text += rvb::io::format_sci(pf, opt.precision);
      if (density) {
        text += ',';
        text += rvb::io::format_sci(pf * m, opt.precision);
      }
      text += '\n';
    }
    emit(opt, text);
    return 0;
  }

  json rows = json::array();
  for (unsigned p = dist.p_min; p <= dist.p_max(); ++p) {
    const double pf = rvb::to_double(dist.prob(p));
    json row = {{"p", p},
                {"gamma", dist.gamma(p)},
                {"prob_exact", rvb::rational_string(dist.prob(p))},
                {"prob_float", pf}};
    if (density) row["density"] = pf * m;
    rows.push_back(std::move(row));
  }
  const json doc = {
      {"meta", make_meta("dist", {{"m", m}, {"n", n}, {"density", density}})},
      {"data", {{"m", m}, {"n", n}, {"density", density}, {"rows", std::move(rows)}}}};
  emit(opt, doc.dump(2) + "\n");
  return 0;
}

int cmd_sweep(unsigned m, double alpha_min, double alpha_max, unsigned steps,
              const OutputOptions& opt) {
  if (m == 0) throw rvb::DomainError("sweep: --m must be positive");
  if (steps == 0) throw rvb::DomainError("sweep: --steps must be positive");
  if (alpha_min < 0.0 || alpha_max < alpha_min)
    throw rvb::DomainError("sweep: need 0 <= alpha-min <= alpha-max");

  struct Row {
    rvb::SweepPoint pt;
    bool snapped = false;
    double requested = 0.0;
  };
  std::vector<Row> rows;
  for (unsigned i = 0; i < steps; ++i) {
    const double a = steps == 1 ? alpha_min
                                : alpha_min + (alpha_max - alpha_min) *
                                      static_cast<double>(i) / (steps - 1);
    const long long n_ll = std::llround(a * m);
    const bool snapped = std::abs(a * m - static_cast<double>(n_ll)) > 1e-9;
    const rvb::BigRational alpha_exact(n_ll, static_cast<long long>(m));
    if (snapped)
      std::fprintf(stderr, "sweep: snapped alpha %.12g -> %s (N = %lld)\n", a,
                   rvb::rational_string(alpha_exact).c_str(), n_ll);
    rows.push_back({rvb::sweep_point(m, alpha_exact), snapped, a});
  }

  if (opt.format == "csv") {
    std::string text = "alpha,M,gamma_bar,M_var_gamma,q_bar,q_var,mean_var_ratio\n";
    for (const Row& r : rows) {
      text += rvb::io::format_sci(rvb::to_double(r.pt.alpha), opt.precision);
      text += ',';
      text += std::to_string(r.pt.m_up);
      text += ',';
      text += rvb::io::format_sci(r.pt.gamma_bar, opt.precision);
      text += ',';
      text += rvb::io::format_sci(r.pt.m_times_var_gamma, opt.precision);
      text += ',';
      text += rvb::io::format_sci(r.pt.q_bar, opt.precision);
      text += ',';
      text += rvb::io::format_sci(r.pt.q_var, opt.precision);
      text += ',';
      text += rvb::io::format_ratio(r.pt.mean_var_ratio, opt.precision);
      text += '\n';
    }
    emit(opt, text);
    return 0;
  }

  json jrows = json::array();
  for (const Row& r : rows) {
    json row = {{"alpha", rvb::rational_string(r.pt.alpha)},
                {"alpha_float", rvb::to_double(r.pt.alpha)},
                {"n", r.pt.n_down},
                {"gamma_bar", r.pt.gamma_bar},
                {"m_var_gamma", r.pt.m_times_var_gamma},
                {"q_bar", r.pt.q_bar},
                {"q_var", r.pt.q_var},
                {"mean_var_ratio", ratio_or_null(r.pt.mean_var_ratio)}};
    if (r.snapped) row["snapped_from"] = r.requested;
    jrows.push_back(std::move(row));
  }
  const json doc = {{"meta", make_meta("sweep", {{"m", m},
                                                 {"alpha_min", alpha_min},
                                                 {"alpha_max", alpha_max},
                                                 {"steps", steps}})},
                    {"data", {{"m", m}, {"rows", std::move(jrows)}}}};
  emit(opt, doc.dump(2) + "\n");
  return 0;
}

int cmd_sample(unsigned m, unsigned n, unsigned long long shots,
               std::uint64_t seed, const OutputOptions& opt) {
  const rvb::SampleReport rep =
      rvb::sample_collapse(rvb::SystemShape(m, n), shots, seed);

  if (opt.format == "csv") {
    std::string text = "p,count,expected,shots,seed,chi_square,p_value_bound\n";
    for (std::size_t i = 0; i < rep.counts.size(); ++i) {
      text += std::to_string(rep.p_min + i);
      text += ',';
      text += std::to_string(rep.counts[i]);
      text += ',';
      text += rvb::io::format_sci(rep.expected[i], opt.precision);
      text += ',';
      text += std::to_string(rep.shots);
      text += ',';
      text += std::to_string(rep.seed);
      text += ',';
      text += rvb::io::format_sci(rep.chi_square, opt.precision);
      text += ',';
      text += rvb::io::format_sci(rep.p_value_bound, opt.precision);
      text += '\n';
    }
    emit(opt, text);
    return 0;
  }

  json counts = json::array();
  for (std::size_t i = 0; i < rep.counts.size(); ++i)
    counts.push_back({{"p", rep.p_min + i},
                      {"count", rep.counts[i]},
                      {"expected", rep.expected[i]}});
  const json doc = {
      {"meta", make_meta("sample", {{"m", m},
                                    {"n", n},
                                    {"shots", shots},
                                    {"seed", seed}})},
      {"data",
       {{"m", m},
        {"n", n},
        {"shots", rep.shots},
        {"seed", rep.seed},
        {"chi_square", rep.chi_square},
        {"dof", rep.dof},
        {"p_value_bound", rep.p_value_bound},
        {"counts", std::move(counts)}}}};
  emit(opt, doc.dump(2) + "\n");
  return 0;
}

int cmd_verify(unsigned max_mu, double tol, const OutputOptions& opt) {
  rvb::verify::Options vopt;
  vopt.max_mu = max_mu;
  vopt.tol = tol;
  const rvb::verify::Report rep = rvb::verify::run_verification(vopt);

  json stages = json::array();
  for (const auto& s : rep.stages) {
    std::fprintf(stderr, "[verify] %s: %s (%s)\n", s.name.c_str(),
                 s.passed ? "ok" : "FAIL", s.detail.c_str());
    stages.push_back({{"name", s.name},
                      {"passed", s.passed},
                      {"detail", s.detail},
                      {"max_deviation", s.max_deviation}});
  }
  const json doc = {
      {"meta", make_meta("verify", {{"max_mu", max_mu}, {"tol", tol}})},
      {"data",
       {{"max_mu", max_mu},
        {"tolerance", tol},
        {"all_passed", rep.all_passed()},
        {"stages", std::move(stages)}}}};
  emit(opt, doc.dump(2) + "\n");
  return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact photon-emission statistics and collapsed RVB states "
               "for the two-row spin ensemble"};
  app.set_version_flag("--version", rvb::io::kVersion);
  app.require_subcommand(1);

  OutputOptions out;
  unsigned m = 0, n = 0, p = 0, steps = 1, max_mu = 12;
  double alpha = -1.0, alpha_min = 0.0, alpha_max = 0.0, tol = 1e-9;
  unsigned long long shots = 0;
  std::uint64_t seed = 1;
  bool density = false;
  bool has_n = false;

  const auto add_output = [&](CLI::App* cmd, bool json_only = false) {
    if (json_only) {
      cmd->add_option("--format", out.format, "output format (json)")
          ->check(CLI::IsMember({"json"}))
          ->capture_default_str();
    } else {
      cmd->add_option("--format", out.format, "output format (csv or json)")
          ->check(CLI::IsMember({"csv", "json"}))
          ->capture_default_str();
    }
    cmd->add_option("--out", out.out_path, "write to this file instead of stdout");
    cmd->add_option("--precision", out.precision, "CSV float digits")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
  };

  CLI::App* c_collapse =
      app.add_subcommand("collapse", "post-measurement state for a photon count");
  c_collapse->add_option("--m", m, "top-row (initially up) spins")->required();
  c_collapse->add_option("--n", n, "bottom-row (initially down) spins")->required();
  c_collapse->add_option("--p", p, "observed photon count")->required();
  add_output(c_collapse);

  CLI::App* c_dist = app.add_subcommand("dist", "exact photon-count distribution");
  c_dist->add_option("--m", m, "top-row spins")->required();
  CLI::Option* dist_n = c_dist->add_option("--n", n, "bottom-row spins");
  CLI::Option* dist_alpha =
      c_dist->add_option("--alpha", alpha, "imbalance ratio N / M (N must come out integer)");
  dist_n->excludes(dist_alpha);
  dist_alpha->excludes(dist_n);
  c_dist->add_flag("--density", density, "add the density column prob_float * M");
  add_output(c_dist);

  CLI::App* c_sweep = app.add_subcommand("sweep", "moments across an alpha grid");
  c_sweep->add_option("--m", m, "top-row spins")->required();
  c_sweep->add_option("--alpha-min", alpha_min, "first alpha")->required();
  c_sweep->add_option("--alpha-max", alpha_max, "last alpha")->required();
  c_sweep->add_option("--steps", steps, "grid points (endpoints included)")->required();
  add_output(c_sweep);

  CLI::App* c_sample = app.add_subcommand("sample", "seeded Monte Carlo emission draws");
  c_sample->add_option("--m", m, "top-row spins")->required();
  c_sample->add_option("--n", n, "bottom-row spins")->required();
  c_sample->add_option("--shots", shots, "number of draws")->required();
  c_sample->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_output(c_sample);

  CLI::App* c_verify = app.add_subcommand("verify", "cross-validation battery");
  c_verify->add_option("--max-mu", max_mu, "state-vector sweep cap (<= 14)")
      ->capture_default_str();
  c_verify->add_option("--tol", tol, "float comparison tolerance")->capture_default_str();
  add_output(c_verify, /*json_only=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_collapse)) return cmd_collapse(m, n, p, out);
    if (app.got_subcommand(c_dist)) {
      has_n = dist_n->count() > 0;
      if (!has_n && dist_alpha->count() == 0)
        throw rvb::DomainError("dist: provide exactly one of --n or --alpha");
      if (!has_n) {
        if (alpha < 0.0) throw rvb::DomainError("dist: alpha must be nonnegative");
        const long long n_ll = std::llround(alpha * m);
        if (std::abs(alpha * m - static_cast<double>(n_ll)) > 1e-9)
          throw rvb::DomainError("dist: alpha * M is not an integer");
        n = static_cast<unsigned>(n_ll);
      }
      return cmd_dist(m, n, density, out);
    }
    if (app.got_subcommand(c_sweep))
      return cmd_sweep(m, alpha_min, alpha_max, steps, out);
    if (app.got_subcommand(c_sample)) return cmd_sample(m, n, shots, seed, out);
    if (app.got_subcommand(c_verify)) return cmd_verify(max_mu, tol, out);
    std::fprintf(stderr, "no subcommand given\n");
    return 2;
  } catch (const rvb::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rvb::CapacityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
