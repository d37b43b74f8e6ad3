#pragma once

#include "pnp/config.hpp"
#include "pnp/denoisers.hpp"
#include "pnp/fidelity.hpp"
#include "pnp/sequence.hpp"
#include "pnp/solver.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pnp::harness {

/// A restoration experiment: source image, degradation, solver settings.
struct ExperimentPreset
{
  /// "deblur", "superres" or "identity" (degenerate smoke test).
  std::string name = "deblur";
  /// PGM path, or "builtin" for the synthetic checkerboard-plus-ramp.
  std::string image = "builtin";
  std::size_t image_size = 64;
  std::size_t blur_size = 5;
  std::size_t downsample_factor = 2;
  double noise_sigma = 0.01;
  SolverConfig solver;
  DenoiserKind denoiser = GaussianSmoothing{};
  std::size_t classify_window = 40;

  /// Defaults for a named preset.
  static ExperimentPreset named(std::string const &name);
  /// `preset` key picks the defaults, every other key overrides one field.
  static ExperimentPreset from_config(KeyValueConfig const &cfg);

  /// Throws on unknown names, missing image files or invalid solver settings.
  void validate() const;
};

DenoiserKind parse_denoiser(std::string const &name, double c_map, double truncation);

/// 8-pixel checkerboard blended with a diagonal ramp, values in [0, 1].
ImageGrid builtin_test_image(std::size_t size = 64);

struct Problem
{
  ImageGrid truth;
  FidelityTerm fidelity;
};

/// Loads the source and degrades it; the noise is drawn from substream(seed, 0).
Problem build_problem(ExperimentPreset const &preset);

struct RunSummary
{
  RunTrace trace;
  CaseClassification classification;
  GradientBoundEstimate gradient_bound;
  DenoiserBoundEstimate denoiser_bound;
  FixedPointReport fixed_point;
};

/// Runs the preset and writes trace.csv, restored.pgm and summary.txt into out_dir.
RunSummary cmd_run(ExperimentPreset const &preset, std::filesystem::path const &out_dir);

/// Solver run only, no files.
RunTrace run_preset(ExperimentPreset const &preset);

/// One cmd_run per (eta, gamma) pair, concurrently, each in its own subdirectory.
std::vector<std::filesystem::path> cmd_sweep(ExperimentPreset const &base,
                                             std::vector<double> const &etas,
                                             std::vector<double> const &gammas,
                                             std::filesystem::path const &out_dir);

enum class AnalyzeMode
{
  automatic,
  s3,
  s12
};

AnalyzeMode parse_analyze_mode(std::string const &text);

struct AnalyzeOptions
{
  AnalyzeMode mode = AnalyzeMode::automatic;
  double gamma = 1.05;
  double eta = 0.6;
  double epsilon = 1e-3;
  std::size_t window = 20;
};

struct AnalyzeResult
{
  std::string bound_kind;
  std::optional<double> c;
  CaseClassification classification;
  std::optional<PgsBound> pgs;
  std::optional<GeometricBound> geometric;
  std::vector<double> bound;
  std::size_t check_start = 1;
  BoundCheck check;
  CauchyCertificate certificate;
};

/// Estimates c, builds the requested majorant, checks it and certifies its tail.
AnalyzeResult analyze_trace(ConditionTrace const &trace, AnalyzeOptions const &opts);

/// Reads and validates a trace CSV, then writes bound.csv and certificate.txt.
AnalyzeResult cmd_analyze(std::filesystem::path const &trace_file,
                          AnalyzeOptions const &opts,
                          std::filesystem::path const &out_dir);

struct PgsDemoResult
{
  PgsSpec spec;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  CauchyCertificate certificate;
  double partial_sum_bound = 0.0;
};

/// PGS with no head and the given chunk lengths; writes pgs.csv and certificate.txt.
PgsDemoResult pgs_demo(double beta, double peak0, std::vector<std::size_t> const &chunk_lengths, double epsilon);
PgsDemoResult cmd_pgs_demo(double beta,
                           double peak0,
                           std::vector<std::size_t> const &chunk_lengths,
                           double epsilon,
                           std::filesystem::path const &out_dir);

} // namespace pnp::harness
