// pnp-admm: run restoration presets, analyze traces, emit PGS demo data.

#include "pnp/harness.hpp"
#include "pnp/trace_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>

namespace {

using namespace pnp;
using namespace pnp::harness;

struct Overrides
{
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<std::size_t> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> image;
  std::optional<std::string> denoiser;
};

KeyValueConfig load_config(std::string const &path)
{
  return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
}

void apply(Overrides const &o, KeyValueConfig &cfg)
{
  if (o.preset) {
    cfg.set("preset", *o.preset);
  }
  if (o.image) {
    cfg.set("image", *o.image);
  }
  if (o.denoiser) {
    cfg.set("denoiser", *o.denoiser);
  }
  if (o.eta) {
    cfg.set("eta", format_real(*o.eta));
  }
  if (o.gamma) {
    cfg.set("gamma", format_real(*o.gamma));
  }
  if (o.lambda) {
    cfg.set("lambda", format_real(*o.lambda));
  }
  if (o.max_iter) {
    cfg.set("max_iter", std::to_string(*o.max_iter));
  }
  if (o.seed) {
    cfg.set("seed", std::to_string(*o.seed));
  }
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Plug-and-play ADMM with adaptive penalty and convergence-bound diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  Overrides ov;
  std::vector<double> sweep_eta;
  std::vector<double> sweep_gamma;

  auto *run_cmd = app.add_subcommand("run", "Degrade an image, restore it, write trace.csv, restored.pgm, summary.txt");
  run_cmd->add_option("--config", config_path, "key = value config file");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--preset", ov.preset, "deblur | superres | identity");
  run_cmd->add_option("--image", ov.image, "PGM (P5) source image, or 'builtin'");
  run_cmd->add_option("--denoiser", ov.denoiser, "gaussian | median | box | identity");
  run_cmd->add_option("--eta", ov.eta, "Residual ratio threshold, 0 < eta < 1");
  run_cmd->add_option("--gamma", ov.gamma, "Penalty growth factor, gamma > 1");
  run_cmd->add_option("--lambda", ov.lambda, "Regularization strength");
  run_cmd->add_option("--max-iter", ov.max_iter, "Iteration cap");
  run_cmd->add_option("--seed", ov.seed, "Noise seed");
  run_cmd->add_option("--sweep-eta", sweep_eta, "Run once per eta (concurrently), one subdirectory each")->delimiter(',');
  run_cmd->add_option("--sweep-gamma", sweep_gamma, "Run once per gamma (concurrently)")->delimiter(',');

  std::string trace_path;
  std::string mode = "auto";
  double epsilon = 1e-3;
  std::size_t window = 20;
  auto *analyze_cmd = app.add_subcommand("analyze", "Build and verify a convergence bound for a trace CSV");
  analyze_cmd->add_option("trace", trace_path, "Trace CSV written by 'run'")->required();
  analyze_cmd->add_option("--config", config_path, "Config supplying gamma and eta");
  analyze_cmd->add_option("--out", out_dir, "Output directory for bound.csv and certificate.txt");
  analyze_cmd->add_option("--mode", mode, "auto | s3 | s12")->check(CLI::IsMember({"auto", "s3", "s12"}));
  analyze_cmd->add_option("--eta", ov.eta, "eta used for the run");
  analyze_cmd->add_option("--gamma", ov.gamma, "gamma used for the run");
  analyze_cmd->add_option("--epsilon", epsilon, "Cauchy tolerance");
  analyze_cmd->add_option("--window", window, "Final-window length for case classification");

  double beta = 0.5;
  double peak = 1.0;
  std::vector<std::size_t> chunks{2, 3, 4, 5, 6};
  auto *demo_cmd = app.add_subcommand("pgs-demo", "Write a piecewise geometric sequence with partial sums");
  demo_cmd->add_option("--config", config_path, "Config supplying beta, peak, epsilon");
  demo_cmd->add_option("--out", out_dir, "Output directory for pgs.csv and certificate.txt");
  demo_cmd->add_option("--beta", beta, "Rate, 0 < beta < 1");
  demo_cmd->add_option("--peak", peak, "First peak A > 0");
  demo_cmd->add_option("--chunks", chunks, "Chunk lengths, comma separated")->delimiter(',');
  demo_cmd->add_option("--epsilon", epsilon, "Cauchy tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      KeyValueConfig cfg = load_config(config_path);
      apply(ov, cfg);
      ExperimentPreset const preset = ExperimentPreset::from_config(cfg);
      if (!sweep_eta.empty() || !sweep_gamma.empty()) {
        for (auto const &dir : cmd_sweep(preset, sweep_eta, sweep_gamma, out_dir)) {
          fmt::print("wrote {}\n", dir.string());
        }
        return 0;
      }
      RunSummary const s = cmd_run(preset, out_dir);
      fmt::print("{} iterations ({}), final delta {:.3e}, case {}, fixed-point residual {:.3e}\n",
                 s.trace.records.size(), to_string(s.trace.stop_reason), s.trace.records.back().delta,
                 to_string(s.classification.label), s.fixed_point.residual);
    } else if (*analyze_cmd) {
      KeyValueConfig cfg = load_config(config_path);
      AnalyzeOptions opts;
      opts.mode = parse_analyze_mode(mode);
      opts.gamma = ov.gamma.value_or(cfg.get_real("gamma", opts.gamma));
      opts.eta = ov.eta.value_or(cfg.get_real("eta", opts.eta));
      opts.epsilon = epsilon;
      opts.window = window;
      if (!ov.gamma && !cfg.contains("gamma")) {
        throw InvalidArgument("analyze needs gamma (--gamma or config)");
      }
      if (!ov.eta && !cfg.contains("eta")) {
        throw InvalidArgument("analyze needs eta (--eta or config)");
      }
      AnalyzeResult const r = cmd_analyze(trace_path, opts, out_dir);
      fmt::print("{} bound, holds={}, worst margin {:.6f}, N={} for epsilon {}\n", r.bound_kind,
                 r.check.holds ? "true" : "false", r.check.worst_margin, r.certificate.n_start, opts.epsilon);
      return r.check.holds ? 0 : 3;
    } else if (*demo_cmd) {
      KeyValueConfig const cfg = load_config(config_path);
      beta = demo_cmd->count("--beta") ? beta : cfg.get_real("beta", beta);
      peak = demo_cmd->count("--peak") ? peak : cfg.get_real("peak", peak);
      epsilon = demo_cmd->count("--epsilon") ? epsilon : cfg.get_real("epsilon", epsilon);
      PgsDemoResult const r = cmd_pgs_demo(beta, peak, chunks, epsilon, out_dir);
      fmt::print("{} terms, sum {:.6g} <= bound {:.6g}, K={} N={} tail bound {:.3e}\n", r.terms.size(),
                 r.partial_sums.back(), r.partial_sum_bound, r.certificate.k_index, r.certificate.n_start,
                 r.certificate.tail_bound);
    }
  } catch (InvalidArgument const &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
