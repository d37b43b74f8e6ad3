#include "pnp/harness.hpp"

#include "pnp/pgm.hpp"
#include "pnp/rng.hpp"
#include "pnp/trace_io.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

namespace pnp::harness {

namespace fs = std::filesystem;

ExperimentPreset ExperimentPreset::named(std::string const &name)
{
  ExperimentPreset p;
  p.name = name;
  if (name == "deblur" || name == "superres") {
    // Weak regularization keeps the denoiser strength in the range where the
    // acceptance threshold eta decides between monotone and switching traces.
    p.solver.lambda = 1e-4;
    p.solver.rho0 = 3.0;
    p.solver.delta_tol = 1e-9;
    if (name == "superres") {
      p.blur_size = 3;
    }
  } else if (name == "identity") {
    p.noise_sigma = 0.0;
    p.denoiser = IdentityDenoiser{};
    p.solver.max_iter = 5;
  } else {
    throw InvalidArgument(fmt::format("unknown preset '{}' (expected deblur, superres or identity)", name));
  }
  return p;
}

DenoiserKind parse_denoiser(std::string const &name, double c_map, double truncation)
{
  if (name == "gaussian") {
    return GaussianSmoothing{c_map, truncation};
  }
  if (name == "median") {
    return MedianFilter{c_map};
  }
  if (name == "box") {
    return BoxAverage{c_map};
  }
  if (name == "identity") {
    return IdentityDenoiser{};
  }
  throw InvalidArgument(fmt::format("unknown denoiser '{}' (expected gaussian, median, box or identity)", name));
}

ExperimentPreset ExperimentPreset::from_config(KeyValueConfig const &cfg)
{
  ExperimentPreset p = named(cfg.get_string("preset", "deblur"));
  p.image = cfg.get_string("image", p.image);
  p.image_size = cfg.get_count("image_size", p.image_size);
  p.blur_size = cfg.get_count("blur_size", p.blur_size);
  p.downsample_factor = cfg.get_count("downsample_factor", p.downsample_factor);
  p.noise_sigma = cfg.get_real("noise_sigma", p.noise_sigma);
  p.classify_window = cfg.get_count("classify_window", p.classify_window);

  SolverConfig &s = p.solver;
  s.lambda = cfg.get_real("lambda", s.lambda);
  s.rho0 = cfg.get_real("rho0", s.rho0);
  s.gamma = cfg.get_real("gamma", s.gamma);
  s.eta = cfg.get_real("eta", s.eta);
  s.max_iter = cfg.get_count("max_iter", s.max_iter);
  s.delta_tol = cfg.get_real("delta_tol", s.delta_tol);
  s.seed = cfg.get_count("seed", s.seed);
  s.keep_snapshots = cfg.get_bool("snapshots", s.keep_snapshots);

  if (cfg.contains("denoiser") || cfg.contains("c_map") || cfg.contains("truncation")) {
    std::string const fallback = denoiser_name(p.denoiser);
    p.denoiser = parse_denoiser(cfg.get_string("denoiser", fallback), cfg.get_real("c_map", 1.0),
                                cfg.get_real("truncation", GaussianSmoothing{}.truncation));
  }
  return p;
}

void ExperimentPreset::validate() const
{
  if (name != "deblur" && name != "superres" && name != "identity") {
    throw InvalidArgument(fmt::format("unknown preset '{}'", name));
  }
  if (image != "builtin" && !fs::exists(image)) {
    throw PgmError(fmt::format("cannot open image '{}': file does not exist", image));
  }
  if (image == "builtin" && image_size == 0) {
    throw InvalidArgument("image_size must be positive");
  }
  if (blur_size % 2 == 0) {
    throw InvalidArgument(fmt::format("blur_size must be odd, got {}", blur_size));
  }
  if (downsample_factor == 0) {
    throw InvalidArgument("downsample_factor must be positive");
  }
  if (!(noise_sigma >= 0.0)) {
    throw InvalidArgument("noise_sigma must be nonnegative");
  }
  if (classify_window == 0) {
    throw InvalidArgument("classify_window must be positive");
  }
  solver.validate();
}

ImageGrid builtin_test_image(std::size_t size)
{
  std::vector<double> px(size * size);
  double const span = size > 1 ? static_cast<double>(2 * (size - 1)) : 1.0;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      double const checker = ((r / 8 + c / 8) % 2 == 0) ? 0.25 : 0.75;
      double const ramp = static_cast<double>(r + c) / span;
      px[r * size + c] = 0.5 * checker + 0.5 * ramp;
    }
  }
  return ImageGrid({size, size}, RealVector(std::move(px)));
}

Problem build_problem(ExperimentPreset const &preset)
{
  preset.validate();
  ImageGrid truth = preset.image == "builtin" ? builtin_test_image(preset.image_size) : load_image(preset.image);
  ImageShape const shape = truth.shape();

  auto op = [&]() {
    if (preset.name == "deblur") {
      return ForwardOperator::circular_blur(shape, Stencil::binomial(preset.blur_size));
    }
    if (preset.name == "superres") {
      return ForwardOperator::downsample(shape, preset.downsample_factor, Stencil::binomial(preset.blur_size));
    }
    return ForwardOperator::identity(shape);
  }();

  Rng rng = substream(preset.solver.seed, 0);
  RealVector const clean = op.apply(truth.pixels());
  RealVector observation = clean + gaussian_vector(rng, clean.dim(), preset.noise_sigma);
  return Problem{std::move(truth), FidelityTerm(std::move(op), std::move(observation))};
}

RunTrace run_preset(ExperimentPreset const &preset)
{
  Problem const problem = build_problem(preset);
  return run(problem.fidelity, preset.denoiser, preset.solver, backprojection_start(problem.fidelity));
}

namespace {

void ensure_directory(fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(),
                            ec ? ec.message() : "not a directory"));
  }
  fs::path const probe = dir / ".write-test";
  std::ofstream out(probe);
  if (!out) {
    throw Error(fmt::format("output directory '{}' is not writable", dir.string()));
  }
  out.close();
  fs::remove(probe, ec);
}

std::ofstream open_output(fs::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(fmt::format("cannot write '{}'", path.string()));
  }
  return out;
}

ImageGrid clamp_to_unit(RealVector const &x, ImageShape shape)
{
  std::vector<double> px(x.storage());
  for (auto &p : px) {
    p = std::clamp(p, 0.0, 1.0);
  }
  return ImageGrid(shape, RealVector(std::move(px)));
}

} // namespace

RunSummary cmd_run(ExperimentPreset const &preset, fs::path const &out_dir)
{
  Problem const problem = build_problem(preset);
  ensure_directory(out_dir);
  FidelityTerm const &f = problem.fidelity;

  GradientBoundAccumulator gradients(f);
  RunTrace trace = [&]() {
    try {
      return run(f, preset.denoiser, preset.solver, backprojection_start(f),
                 [&](std::size_t, IterateTriple const &theta) { gradients.add(theta.x()); });
    } catch (Error const &e) {
      throw Error(fmt::format("solver failed: {}", e.what()));
    }
  }();

  std::size_t const box_samples = 16;
  for (std::size_t i = 0; i < box_samples; ++i) {
    Rng rng = substream(preset.solver.seed, 1000 + i);
    gradients.add(uniform_vector(rng, f.dim()));
  }
  GradientBoundEstimate const m_hat =
    gradients.result(fmt::format("{} trajectory iterates + {} samples of [0,1]^d", trace.records.size(), box_samples));

  double const sigma0 = std::sqrt(preset.solver.lambda / preset.solver.rho0);
  std::vector<double> grid{sigma0};
  if (trace.records.back().sigma != sigma0) {
    grid.push_back(trace.records.back().sigma);
  }
  DenoiserBoundEstimate const k_hat =
    estimate_assumption2_constant(preset.denoiser, f.op().input_shape(), grid, 8, preset.solver.seed + 1);

  FixedPointReport const fp = fixed_point_residual(f, preset.denoiser, trace);

  ConditionTrace const ct = ConditionTrace::from_records(trace.records, preset.solver.gamma, preset.solver.eta);
  CaseClassification cls{CaseLabel::S1Like, "trace too short to classify"};
  bool classified = false;
  if (ct.size() > preset.classify_window) {
    cls = classify_case(ct, preset.classify_window);
    classified = true;
  }

  write_trace_csv(out_dir / "trace.csv", trace.records);
  save_image(clamp_to_unit(trace.final_iterate.x(), f.op().input_shape()), out_dir / "restored.pgm");

  auto out = open_output(out_dir / "summary.txt");
  auto const &last = trace.records.back();
  std::size_t c1 = 0;
  std::size_t c2 = 0;
  for (auto const &r : trace.records) {
    if (r.condition) {
      (*r.condition == ConditionFlag::C1 ? c1 : c2)++;
    }
  }
  out << fmt::format("preset: {}\n", preset.name);
  out << fmt::format("operator: {}\n", f.op().name());
  out << fmt::format("denoiser: {}\n", denoiser_name(preset.denoiser));
  out << fmt::format("lambda: {}\nrho0: {}\ngamma: {}\neta: {}\n", format_real(preset.solver.lambda),
                     format_real(preset.solver.rho0), format_real(preset.solver.gamma),
                     format_real(preset.solver.eta));
  out << fmt::format("iterations: {}\nstop_reason: {}\n", trace.records.size(), to_string(trace.stop_reason));
  out << fmt::format("final_delta: {}\nfinal_rho: {}\n", format_real(last.delta), format_real(last.rho));
  out << fmt::format("c1_count: {}\nc2_count: {}\n", c1, c2);
  out << fmt::format("case: {}\ncase_caveat: {}\n", classified ? to_string(cls.label) : "unclassified", cls.caveat);
  out << fmt::format("m_hat: {}\nm_hat_region: {}\n", format_real(m_hat.m_hat), m_hat.region);
  out << fmt::format("k_hat: {}\nk_hat_samples: {}\n", format_real(k_hat.k_hat), k_hat.sample_count);
  out << fmt::format("fixed_point_residual: {}\n", format_real(fp.residual));
  out << fmt::format("truth_rmse: {}\n",
                     format_real(distance(trace.final_iterate.x(), problem.truth.pixels()) /
                                 std::sqrt(static_cast<double>(f.dim()))));

  return RunSummary{std::move(trace), cls, m_hat, k_hat, fp};
}

std::vector<fs::path> cmd_sweep(ExperimentPreset const &base,
                                std::vector<double> const &etas,
                                std::vector<double> const &gammas,
                                fs::path const &out_dir)
{
  std::vector<double> const eta_list = etas.empty() ? std::vector<double>{base.solver.eta} : etas;
  std::vector<double> const gamma_list = gammas.empty() ? std::vector<double>{base.solver.gamma} : gammas;

  std::vector<fs::path> dirs;
  std::vector<std::future<void>> jobs;
  for (double const eta : eta_list) {
    for (double const gamma : gamma_list) {
      ExperimentPreset p = base;
      p.solver.eta = eta;
      p.solver.gamma = gamma;
      fs::path dir = out_dir / fmt::format("eta{}_gamma{}", eta, gamma);
      dirs.push_back(dir);
      jobs.push_back(std::async(std::launch::async, [p, dir]() { cmd_run(p, dir); }));
    }
  }
  for (auto &job : jobs) {
    job.get();
  }
  return dirs;
}

AnalyzeMode parse_analyze_mode(std::string const &text)
{
  if (text == "auto") {
    return AnalyzeMode::automatic;
  }
  if (text == "s3") {
    return AnalyzeMode::s3;
  }
  if (text == "s12") {
    return AnalyzeMode::s12;
  }
  throw InvalidArgument(fmt::format("unknown analyze mode '{}' (expected auto, s3 or s12)", text));
}

namespace {

/// Number of trailing iterations that share the final condition flag.
std::size_t trailing_run_length(ConditionTrace const &trace)
{
  std::size_t const last = trace.condition_count();
  ConditionFlag const flag = trace.condition_at(last);
  std::size_t run = 1;
  while (run < last && trace.condition_at(last - run) == flag) {
    ++run;
  }
  return run;
}

} // namespace

AnalyzeResult analyze_trace(ConditionTrace const &trace, AnalyzeOptions const &opts)
{
  trace.validate();
  if (trace.size() < 2) {
    throw BoundConstructionError("insufficient iterations for bound construction");
  }
  AnalyzeResult res;
  std::size_t const window = std::min(opts.window, trace.condition_count());
  res.classification = classify_case(trace, window);

  bool has_c1 = false;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    has_c1 = has_c1 || trace.condition_at(k) == ConditionFlag::C1;
  }
  if (has_c1) {
    res.c = estimate_lemma1_constant(trace);
  }

  AnalyzeMode mode = opts.mode;
  std::size_t s12_window = window;
  if (mode == AnalyzeMode::automatic) {
    mode = AnalyzeMode::s12;
    if (res.classification.label == CaseLabel::S3Like) {
      try {
        res.pgs = construct_s3_bound(trace, *res.c);
        mode = AnalyzeMode::s3;
      } catch (BoundConstructionError const &) {
        // Mixed final window but fewer than two switches overall: the
        // geometric bound still applies to the trailing single-condition run.
        s12_window = trailing_run_length(trace);
      }
    }
  }

  PgsSpec spec;
  if (mode == AnalyzeMode::s3) {
    if (!res.c) {
      throw BoundConstructionError("PGS bound needs at least one C1 iteration");
    }
    if (!res.pgs) {
      res.pgs = construct_s3_bound(trace, *res.c);
    }
    res.bound_kind = "pgs";
    res.bound = res.pgs->values();
    res.check_start = res.pgs->n1 + 1;
    spec = res.pgs->spec;
  } else {
    res.geometric = construct_s12_bound(trace, res.c, s12_window);
    res.bound_kind = "geometric";
    res.bound = res.geometric->values(trace);
    res.check_start = res.geometric->n + 1;
    spec = res.geometric->as_pgs(trace);
  }
  res.check = verify_bound(trace.deltas, res.bound, res.check_start);
  res.certificate = cauchy_index(spec, opts.epsilon);
  return res;
}

AnalyzeResult cmd_analyze(fs::path const &trace_file, AnalyzeOptions const &opts, fs::path const &out_dir)
{
  auto const records = read_trace_csv(trace_file);
  ConditionTrace const trace = ConditionTrace::from_records(records, opts.gamma, opts.eta);
  AnalyzeResult res = analyze_trace(trace, opts);

  ensure_directory(out_dir);
  {
    auto out = open_output(out_dir / "bound.csv");
    write_bound_csv(out, trace.deltas, res.bound);
  }
  auto out = open_output(out_dir / "certificate.txt");
  out << fmt::format("trace: {}\nrecords: {}\n", trace_file.string(), trace.size());
  out << fmt::format("gamma: {}\neta: {}\n", format_real(opts.gamma), format_real(opts.eta));
  out << fmt::format("case: {}\ncase_caveat: {}\n", to_string(res.classification.label), res.classification.caveat);
  out << fmt::format("c_hat: {}\n", res.c ? format_real(*res.c) : std::string("undefined"));
  out << fmt::format("bound: {}\n", res.bound_kind);
  if (res.pgs) {
    out << fmt::format("beta: {}\npeak0: {}\nn1: {}\n", format_real(res.pgs->spec.beta),
                       format_real(res.pgs->spec.peak0), res.pgs->n1);
    out << fmt::format("c1_onsets: {}\n", fmt::join(res.pgs->c1_onsets, " "));
    out << fmt::format("c2_onsets: {}\n", fmt::join(res.pgs->c2_onsets, " "));
  } else {
    out << fmt::format("beta: {}\nA: {}\nn: {}\nanchor: {}\n", format_real(res.geometric->beta),
                       format_real(res.geometric->A), res.geometric->n, format_real(res.geometric->anchor));
  }
  out << fmt::format("check_start: {}\nholds: {}\nworst_margin: {}\nworst_index: {}\n", res.check_start,
                     res.check.holds ? "true" : "false", format_real(res.check.worst_margin), res.check.worst_index);
  out << fmt::format("epsilon: {}\nK: {}\nN: {}\ntail_bound: {}\n", format_real(res.certificate.epsilon),
                     res.certificate.k_index, res.certificate.n_start, format_real(res.certificate.tail_bound));
  return res;
}

PgsDemoResult pgs_demo(double beta, double peak0, std::vector<std::size_t> const &chunk_lengths, double epsilon)
{
  if (chunk_lengths.empty()) {
    throw InvalidArgument("pgs-demo: at least one chunk length is required");
  }
  PgsDemoResult res;
  res.spec.beta = beta;
  res.spec.peak0 = peak0;
  std::size_t start = 0;
  for (std::size_t const len : chunk_lengths) {
    if (len == 0) {
      throw InvalidArgument("pgs-demo: chunk lengths must be positive");
    }
    res.spec.chunk_starts.push_back(start);
    start += len;
  }
  res.spec.validate();
  res.terms = pgs_generate(res.spec, start);
  double sum = 0.0;
  for (double const y : res.terms) {
    sum += y;
    res.partial_sums.push_back(sum);
  }
  res.certificate = cauchy_index(res.spec, epsilon);
  res.partial_sum_bound = pgs_partial_sum_bound(res.spec);
  return res;
}

PgsDemoResult cmd_pgs_demo(double beta,
                           double peak0,
                           std::vector<std::size_t> const &chunk_lengths,
                           double epsilon,
                           fs::path const &out_dir)
{
  PgsDemoResult res = pgs_demo(beta, peak0, chunk_lengths, epsilon);
  ensure_directory(out_dir);
  {
    auto out = open_output(out_dir / "pgs.csv");
    out << kPgsDemoHeader << '\n';
    std::size_t j = 1;
    for (std::size_t k = 1; k <= res.terms.size(); ++k) {
      while (k > res.spec.chunk_start(j + 1)) {
        ++j;
      }
      out << k << ',' << format_real(res.terms[k - 1]) << ',' << format_real(res.partial_sums[k - 1]) << ','
          << format_real(pgs_chunk_sum_bound(res.spec, j)) << '\n';
    }
  }
  auto out = open_output(out_dir / "certificate.txt");
  out << fmt::format("beta: {}\npeak0: {}\nchunks: {}\n", format_real(beta), format_real(peak0),
                     fmt::join(chunk_lengths, " "));
  out << fmt::format("partial_sum_bound: {}\n", format_real(res.partial_sum_bound));
  out << fmt::format("epsilon: {}\nK: {}\nN: {}\ntail_bound: {}\n", format_real(epsilon), res.certificate.k_index,
                     res.certificate.n_start, format_real(res.certificate.tail_bound));
  return res;
}

} // namespace pnp::harness
