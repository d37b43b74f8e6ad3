#pragma once

#include "pnp/image.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace pnp {

/// Spatial Gaussian whose standard deviation in pixels is
/// c_map * sigma * max(width, height); truncated at `truncation` deviations.
/// The default cut leaves tail weights below double rounding, so the residue
/// ||D_sigma(x) - x|| grows monotonically with sigma.
struct GaussianSmoothing
{
  double c_map = 1.0;
  double truncation = 8.0;
};

/// Median over a (2r+1) x (2r+1) window, r = round(c_map * sigma * max(width, height)).
struct MedianFilter
{
  double c_map = 1.0;
};

/// Mean over the same window as MedianFilter.
struct BoxAverage
{
  double c_map = 1.0;
};

/// Idle filter at every sigma. Degenerate denoiser for smoke tests.
struct IdentityDenoiser
{
};

/// Caller-supplied denoiser, e.g. test stubs. Only evaluated for sigma > 0.
struct CustomDenoiser
{
  std::string name;
  std::function<ImageGrid(double sigma, ImageGrid const &)> apply;
};

using DenoiserKind = std::variant<GaussianSmoothing, MedianFilter, BoxAverage, IdentityDenoiser, CustomDenoiser>;

std::string denoiser_name(DenoiserKind const &kind);

/// D_sigma(img). Every kind returns `img` unchanged at sigma = 0.
ImageGrid denoise(DenoiserKind const &kind, double sigma, ImageGrid const &img);

/// Pixel standard deviation used by GaussianSmoothing at this sigma.
double gaussian_pixel_stddev(GaussianSmoothing const &g, double sigma, ImageShape shape);

/// Normalized 1-D Gaussian taps, index 0 is offset -radius.
std::vector<double> gaussian_taps(double stddev, double truncation);

/// Window half-width r for the discrete-window filters; the window is 2r+1 wide.
std::size_t window_half_width(double c_map, double sigma, ImageShape shape);

/// ||D_sigma(x) - x||^2 / (d sigma^2).
double residue_ratio(DenoiserKind const &kind, double sigma, ImageGrid const &img);

/// Empirical bound on the constant K in ||D_sigma(x) - x||^2 <= K d sigma^2.
struct DenoiserBoundEstimate
{
  double k_hat = 0.0;
  std::size_t sample_count = 0;
  std::vector<double> sigma_grid;
  ImageShape shape;
  std::uint64_t seed = 0;

  /// k_hat == 0: the denoiser left every sample untouched.
  bool vacuous() const noexcept { return k_hat == 0.0; }
};

/// Max of residue_ratio over `n_samples` uniform-noise images and every sigma
/// in the grid. Sample i uses substream(seed, i).
DenoiserBoundEstimate estimate_assumption2_constant(DenoiserKind const &kind,
                                                    ImageShape shape,
                                                    std::vector<double> const &sigma_grid,
                                                    std::size_t n_samples,
                                                    std::uint64_t seed);

struct Assumption2Report
{
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  double threshold = 0.0;
  std::size_t checked = 0;
};

/// Counts held-out (image, sigma) pairs whose ratio exceeds k_hat * (1 + margin).
Assumption2Report verify_assumption2(DenoiserKind const &kind,
                                     DenoiserBoundEstimate const &estimate,
                                     std::size_t n_holdout,
                                     std::uint64_t seed,
                                     double margin = 0.5);

} // namespace pnp
