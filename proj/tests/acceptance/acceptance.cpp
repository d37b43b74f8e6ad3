// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--out DIR] [A1 A2 ...]
//
// With no criterion names every criterion runs.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "pnp/denoisers.hpp"
#include "pnp/fidelity.hpp"
#include "pnp/harness.hpp"
#include "pnp/rng.hpp"
#include "pnp/sequence.hpp"
#include "pnp/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pnp;
using namespace pnp::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

class Stopwatch
{
public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_double(double v, int precision = 3)
{
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string slurp(fs::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path g_out = fs::temp_directory_path() / "pnpadmm-acceptance";

// Pinned settings.
constexpr std::size_t kSpecCount = 100;
constexpr std::size_t kHorizon = 10000;
constexpr std::uint64_t kSpecSeed = 20240601;

std::vector<PgsSpec> a1_specs()
{
  Rng rng = substream(kSpecSeed, 0);
  std::vector<PgsSpec> specs;
  for (std::size_t i = 0; i < kSpecCount; ++i) {
    specs.push_back(fixture::random_pgs_spec(rng, kHorizon));
  }
  return specs;
}

ExperimentPreset preset(std::string const &name, double eta, double gamma)
{
  auto p = ExperimentPreset::named(name);
  p.solver.eta = eta;
  p.solver.gamma = gamma;
  p.solver.max_iter = 100;
  return p;
}

std::string run_name(ExperimentPreset const &p)
{
  return p.name + "_eta" + fmt_double(p.solver.eta) + "_gamma" + fmt_double(p.solver.gamma);
}

/// Runs are shared between criteria within one process.
RunSummary const &cached_run(ExperimentPreset const &p)
{
  static std::map<std::string, RunSummary> cache;
  std::string const key = run_name(p);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, cmd_run(p, g_out / key)).first;
  }
  return it->second;
}

std::vector<ExperimentPreset> a2_presets()
{
  std::vector<ExperimentPreset> out;
  for (double eta : {0.9, 0.95}) {
    for (double gamma : {1.05, 1.2}) {
      out.push_back(preset("deblur", eta, gamma));
    }
  }
  return out;
}

std::vector<ExperimentPreset> a4_presets()
{
  std::vector<ExperimentPreset> out;
  for (char const *name : {"deblur", "superres"}) {
    for (double eta : {0.1, 0.95}) {
      out.push_back(preset(name, eta, ExperimentPreset::named(name).solver.gamma));
    }
  }
  return out;
}

ConditionTrace condition_trace(RunSummary const &s, ExperimentPreset const &p)
{
  return ConditionTrace::from_records(s.trace.records, p.solver.gamma, p.solver.eta);
}

Outcome a1()
{
  Stopwatch sw;
  std::size_t violations = 0;
  double worst = 0.0;
  for (auto const &spec : a1_specs()) {
    auto const y = pgs_generate(spec, kHorizon);
    double const bound = pgs_partial_sum_bound(spec);
    double sum = 0.0;
    for (double v : y) {
      sum += v;
      if (sum > bound) {
        ++violations;
      }
    }
    worst = std::max(worst, sum / bound);
  }
  double const t = sw.seconds();
  return {violations == 0 && t < 10.0, std::to_string(kSpecCount) + " specs x " + std::to_string(kHorizon) +
                                         " terms, " + std::to_string(violations) +
                                         " violations, max partial/bound " + fmt_double(worst, 6) + ", " +
                                         fmt_double(t) + " s"};
}

Outcome a2()
{
  Stopwatch sw;
  std::size_t included = 0;
  bool all_hold = true;
  std::ostringstream notes;
  for (auto const &p : a2_presets()) {
    auto const &s = cached_run(p);
    auto const t = condition_trace(s, p);
    notes << " [" << run_name(p) << ": ";
    double c = 0.0;
    PgsBound b;
    try {
      c = estimate_lemma1_constant(t);
      b = construct_s3_bound(t, c);
    } catch (BoundConstructionError const &e) {
      notes << "excluded, " << e.what() << "]";
      continue;
    }
    ++included;
    auto const check = verify_bound(t.deltas, b.values(), b.n1 + 1);
    all_hold = all_hold && check.holds;
    notes << (check.holds ? "holds" : "FAILS") << ", n1=" << b.n1 << ", " << b.c2_onsets.size()
          << " switches, worst margin " << fmt_double(check.worst_margin, 6) << "]";
  }
  double const t = sw.seconds();
  bool const pass = included >= 1 && all_hold && t < 60.0;
  return {pass, std::to_string(included) + "/4 runs S3-like and bounded," + notes.str() + ", " + fmt_double(t) + " s"};
}

Outcome a3()
{
  std::size_t violations = 0;
  std::size_t checked = 0;
  for (auto const &spec : a1_specs()) {
    auto const y = pgs_generate(spec, kHorizon);
    for (double eps : {1e-1, 1e-3}) {
      ++checked;
      auto const cert = cauchy_index(spec, eps);
      double const q = 1.0 - spec.beta;
      double const thr = eps * q * q / spec.peak0;
      bool const satisfies = std::pow(spec.beta, double(cert.k_index - 1)) < thr;
      bool const minimal = cert.k_index == 1 || !(std::pow(spec.beta, double(cert.k_index - 2)) < thr);
      double tail = 0.0;
      for (std::size_t k = cert.n_start; k <= kHorizon; ++k) {
        tail += y[k - 1];
      }
      if (!satisfies || !minimal || !(tail < eps) || cert.n_start != spec.chunk_start(cert.k_index) + 1) {
        ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(checked) + " (spec, epsilon) pairs, " + std::to_string(violations) +
                             " violations"};
}

Outcome a4()
{
  bool pass = true;
  std::ostringstream notes;
  for (auto const &p : a4_presets()) {
    auto const &s = cached_run(p);
    std::size_t last_c2 = 0;
    std::size_t late_c1 = 0;
    std::size_t late_c2 = 0;
    for (auto const &r : s.trace.records) {
      if (!r.condition) {
        continue;
      }
      if (*r.condition == ConditionFlag::C2) {
        last_c2 = r.iter;
      }
      if (r.iter > 20) {
        (*r.condition == ConditionFlag::C1 ? late_c1 : late_c2)++;
      }
    }
    bool ok = false;
    if (p.solver.eta < 0.5) {
      ok = last_c2 < 20 && s.classification.label == CaseLabel::S1Like;
    } else {
      ok = late_c1 > 0 && late_c2 > 0 && s.classification.label == CaseLabel::S3Like;
    }
    pass = pass && ok && s.trace.records.size() == 100;
    notes << " [" << run_name(p) << ": " << to_string(s.classification.label) << ", last C2 at " << last_c2
          << ", after 20: " << late_c1 << " C1 / " << late_c2 << " C2" << (ok ? "" : " MISMATCH") << "]";
  }
  return {pass, "eta=0.1 S1-like, eta=0.95 S3-like for both presets:" + notes.str()};
}

Outcome a5()
{
  std::vector<double> const grid{0.05, 0.1, 0.2};
  ImageShape const shape{16, 16};
  auto const est = estimate_assumption2_constant(GaussianSmoothing{}, shape, grid, 100, 1);
  auto const rep = verify_assumption2(GaussianSmoothing{}, est, 1000, 2, 0.5);

  std::size_t identity_failures = 0;
  std::vector<DenoiserKind> const kinds{GaussianSmoothing{}, MedianFilter{}, BoxAverage{}, IdentityDenoiser{}};
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng = substream(3, i);
    auto const img = uniform_image(rng, shape);
    for (auto const &k : kinds) {
      if (!(denoise(k, 0.0, img) == img)) {
        ++identity_failures;
      }
    }
  }
  bool const pass = rep.violations == 0 && identity_failures == 0 && std::isfinite(est.k_hat);
  return {pass, "k_hat " + fmt_double(est.k_hat, 6) + ", worst holdout ratio " + fmt_double(rep.worst_ratio, 6) +
                  " vs threshold " + fmt_double(rep.threshold, 6) + ", " + std::to_string(rep.violations) + "/" +
                  std::to_string(rep.checked) + " violations, sigma=0 identity failures " +
                  std::to_string(identity_failures)};
}

Outcome a6()
{
  Rng rng = substream(6, 0);
  ImageShape const s{8, 4};
  std::uniform_real_distribution<double> log_rho(-2.0, 2.0);
  std::bernoulli_distribution coin(0.5);
  double worst_err = 0.0;
  double worst_res = 0.0;
  std::size_t failures = 0;
  std::size_t count = 0;
  for (int kind = 0; kind < 4; ++kind) {
    for (int i = 0; i < 50; ++i) {
      ForwardOperator op = ForwardOperator::identity(s);
      if (kind == 1) {
        op = ForwardOperator::circular_blur(s, Stencil::binomial(3));
      } else if (kind == 2) {
        std::vector<bool> keep(s.size());
        for (std::size_t j = 0; j < keep.size(); ++j) {
          keep[j] = coin(rng);
        }
        op = ForwardOperator::mask(s, keep);
      } else if (kind == 3) {
        op = ForwardOperator::downsample(s, 2);
      }
      FidelityTerm const f(op, gaussian_vector(rng, op.output_dim(), 1.0));
      double const rho = std::pow(10.0, log_rho(rng));
      auto const t = gaussian_vector(rng, s.size(), 1.0);
      auto const x = prox_x_update(f, rho, t);
      double const err = oracle::relative_error(x.storage(), oracle::direct_prox(f, rho, t));
      double const res = normal_equation_residual(f, rho, t, x);
      worst_err = std::max(worst_err, err);
      worst_res = std::max(worst_res, res);
      failures += (err > 1e-8 || res > 1e-8) ? 1 : 0;
      ++count;
    }
  }
  return {failures == 0, std::to_string(count) + " instances over 4 operators, worst relative error " +
                           fmt_double(worst_err) + ", worst normal-equation residual " + fmt_double(worst_res)};
}

Outcome a7()
{
  std::vector<ExperimentPreset> presets = a2_presets();
  for (auto const &p : a4_presets()) {
    presets.push_back(p);
  }
  std::set<std::string> seen;
  std::size_t runs = 0;
  std::ostringstream problems;
  for (auto const &p : presets) {
    std::string const name = run_name(p);
    if (!seen.insert(name).second) {
      continue;
    }
    ++runs;
    auto const &s = cached_run(p);
    double prev = p.solver.rho0;
    for (auto const &r : s.trace.records) {
      double const ratio = r.rho / prev;
      if (r.rho < prev || !(ratio == 1.0 || std::abs(ratio - p.solver.gamma) <= 1e-12 * p.solver.gamma)) {
        problems << " " << name << ": rho step at " << r.iter << ";";
        break;
      }
      if (std::abs(r.sigma * r.sigma * r.rho - p.solver.lambda) > 1e-12 * p.solver.lambda) {
        problems << " " << name << ": sigma^2 rho != lambda at " << r.iter << ";";
        break;
      }
      prev = r.rho;
    }
    try {
      condition_trace(s, p).validate();
    } catch (TraceInvariantError const &e) {
      problems << " " << name << ": " << e.what() << ";";
    }
    fs::path const rerun = g_out / (name + "-rerun");
    (void)cmd_run(p, rerun);
    if (slurp(g_out / name / "trace.csv") != slurp(rerun / "trace.csv")) {
      problems << " " << name << ": rerun trace differs;";
    }
  }
  std::string const p = problems.str();
  return {p.empty(), std::to_string(runs) + " runs checked for rho monotonicity, sigma consistency, flag "
                                            "consistency and byte-identical reruns" +
                       (p.empty() ? std::string() : ";" + p)};
}

Outcome a8()
{
  auto p = preset("deblur", 0.6, 1.2);
  p.solver.keep_snapshots = true;
  p.solver.delta_tol = 1e-10;
  p.solver.max_iter = 300;
  auto const trace = run_preset(p);
  auto const &snaps = trace.snapshots;
  std::size_t const n = trace.records.size();
  Rng rng = substream(8, 0);
  std::uniform_int_distribution<std::size_t> idx(0, n);
  double worst = -1e300;
  std::size_t violations = 0;
  for (int i = 0; i < 100; ++i) {
    std::size_t a = idx(rng);
    std::size_t b = idx(rng);
    if (a > b) {
      std::swap(a, b);
    }
    double sum = 0.0;
    for (std::size_t k = a + 1; k <= b; ++k) {
      sum += trace.records[k - 1].delta;
    }
    double const gap = metric_distance(snaps[a], snaps[b]) - sum;
    worst = std::max(worst, gap);
    violations += gap > 1e-10 ? 1 : 0;
  }
  return {violations == 0, "run " + std::string(to_string(trace.stop_reason)) + " after " +
                                          std::to_string(n) + " iterations, 100 pairs, " +
                                          std::to_string(violations) + " violations, max D - sum " +
                                          fmt_double(worst)};
}

} // namespace

int main(int argc, char **argv)
{
  std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria{
    {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8}};
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    std::string const arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      g_out = argv[++i];
    } else {
      only.insert(arg);
    }
  }

  int failures = 0;
  for (auto const &[name, fn] : criteria) {
    if (!only.empty() && only.count(name) == 0) {
      continue;
    }
    Outcome o;
    try {
      o = fn();
    } catch (std::exception const &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %s  %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
