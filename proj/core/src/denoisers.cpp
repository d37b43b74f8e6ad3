#include "pnp/denoisers.hpp"

#include "pnp/errors.hpp"
#include "pnp/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pnp {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_sigma(double sigma)
{
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw InvalidArgument(fmt::format("denoise: sigma must be finite and nonnegative, got {}", sigma));
  }
}

// Separable filter with reflective boundaries; taps centred at index radius.
std::vector<double> separable_filter(std::vector<double> const &src, ImageShape shape, std::vector<double> const &taps)
{
  auto const radius = static_cast<long long>(taps.size() / 2);
  std::size_t const w = shape.width;
  std::size_t const h = shape.height;

  std::vector<double> tmp(src.size());
  for (std::size_t r = 0; r < h; ++r) {
    double const *row = src.data() + r * w;
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (long long t = -radius; t <= radius; ++t) {
        acc += taps[t + radius] * row[reflect_index(static_cast<long long>(c) + t, w)];
      }
      tmp[r * w + c] = acc;
    }
  }

  std::vector<double> out(src.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (long long t = -radius; t <= radius; ++t) {
        acc += taps[t + radius] * tmp[reflect_index(static_cast<long long>(r) + t, h) * w + c];
      }
      out[r * w + c] = acc;
    }
  }
  return out;
}

ImageGrid gaussian_smooth(GaussianSmoothing const &g, double sigma, ImageGrid const &img)
{
  double const stddev = gaussian_pixel_stddev(g, sigma, img.shape());
  auto const taps = gaussian_taps(stddev, g.truncation);
  auto out = separable_filter(img.pixels().storage(), img.shape(), taps);
  return ImageGrid(img.shape(), RealVector(std::move(out)));
}

ImageGrid box_average(BoxAverage const &b, double sigma, ImageGrid const &img)
{
  std::size_t const r = window_half_width(b.c_map, sigma, img.shape());
  if (r == 0) {
    return img;
  }
  std::vector<double> taps(2 * r + 1, 1.0 / static_cast<double>(2 * r + 1));
  auto out = separable_filter(img.pixels().storage(), img.shape(), taps);
  return ImageGrid(img.shape(), RealVector(std::move(out)));
}

ImageGrid median_filter(MedianFilter const &m, double sigma, ImageGrid const &img)
{
  std::size_t const r = window_half_width(m.c_map, sigma, img.shape());
  if (r == 0) {
    return img;
  }
  std::size_t const w = img.width();
  std::size_t const h = img.height();
  auto const rr = static_cast<long long>(r);
  auto const &src = img.pixels().storage();

  std::vector<double> window;
  window.reserve((2 * r + 1) * (2 * r + 1));
  std::vector<double> out(src.size());
  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      window.clear();
      for (long long dr = -rr; dr <= rr; ++dr) {
        std::size_t const sr = reflect_index(static_cast<long long>(row) + dr, h);
        for (long long dc = -rr; dc <= rr; ++dc) {
          window.push_back(src[sr * w + reflect_index(static_cast<long long>(col) + dc, w)]);
        }
      }
      auto const mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out[row * w + col] = *mid;
    }
  }
  return ImageGrid(img.shape(), RealVector(std::move(out)));
}

} // namespace

std::string denoiser_name(DenoiserKind const &kind)
{
  return std::visit(overloaded{[](GaussianSmoothing const &) -> std::string { return "gaussian"; },
                               [](MedianFilter const &) -> std::string { return "median"; },
                               [](BoxAverage const &) -> std::string { return "box"; },
                               [](IdentityDenoiser const &) -> std::string { return "identity"; },
                               [](CustomDenoiser const &c) -> std::string { return c.name; }},
                    kind);
}

double gaussian_pixel_stddev(GaussianSmoothing const &g, double sigma, ImageShape shape)
{
  return g.c_map * sigma * static_cast<double>(std::max(shape.width, shape.height));
}

std::vector<double> gaussian_taps(double stddev, double truncation)
{
  if (!(stddev > 0.0) || !(truncation > 0.0)) {
    throw InvalidArgument("gaussian_taps: stddev and truncation must be positive");
  }
  auto const radius = static_cast<long long>(std::ceil(truncation * stddev));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (long long t = -radius; t <= radius; ++t) {
    double const z = static_cast<double>(t) / stddev;
    taps[t + radius] = std::exp(-0.5 * z * z);
    total += taps[t + radius];
  }
  for (auto &t : taps) {
    t /= total;
  }
  return taps;
}

std::size_t window_half_width(double c_map, double sigma, ImageShape shape)
{
  double const scaled = c_map * sigma * static_cast<double>(std::max(shape.width, shape.height));
  return static_cast<std::size_t>(std::llround(scaled));
}

ImageGrid denoise(DenoiserKind const &kind, double sigma, ImageGrid const &img)
{
  check_sigma(sigma);
  if (sigma == 0.0) {
    return img;
  }
  return std::visit(overloaded{[&](GaussianSmoothing const &g) { return gaussian_smooth(g, sigma, img); },
                               [&](MedianFilter const &m) { return median_filter(m, sigma, img); },
                               [&](BoxAverage const &b) { return box_average(b, sigma, img); },
                               [&](IdentityDenoiser const &) { return img; },
                               [&](CustomDenoiser const &c) {
                                 ImageGrid out = c.apply(sigma, img);
                                 if (out.shape() != img.shape()) {
                                   throw DimensionError(
                                     fmt::format("denoiser '{}' changed the image shape", c.name));
                                 }
                                 return out;
                               }},
                    kind);
}

double residue_ratio(DenoiserKind const &kind, double sigma, ImageGrid const &img)
{
  if (!(sigma > 0.0)) {
    throw InvalidArgument("residue_ratio: sigma must be positive");
  }
  ImageGrid const out = denoise(kind, sigma, img);
  double const r = distance(out.pixels(), img.pixels());
  return r * r / (static_cast<double>(img.shape().size()) * sigma * sigma);
}

namespace {

void check_grid(std::vector<double> const &sigma_grid)
{
  if (sigma_grid.empty()) {
    throw InvalidArgument("sigma grid must not be empty");
  }
  for (double const s : sigma_grid) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidArgument(fmt::format("sigma grid entries must be positive, got {}", s));
    }
  }
}

} // namespace

DenoiserBoundEstimate estimate_assumption2_constant(DenoiserKind const &kind,
                                                    ImageShape shape,
                                                    std::vector<double> const &sigma_grid,
                                                    std::size_t n_samples,
                                                    std::uint64_t seed)
{
  check_grid(sigma_grid);
  if (n_samples == 0) {
    throw InvalidArgument("estimate_assumption2_constant: need at least one sample");
  }
  DenoiserBoundEstimate est;
  est.sample_count = n_samples;
  est.sigma_grid = sigma_grid;
  est.shape = shape;
  est.seed = seed;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng = substream(seed, i);
    ImageGrid const img = uniform_image(rng, shape);
    for (double const s : sigma_grid) {
      est.k_hat = std::max(est.k_hat, residue_ratio(kind, s, img));
    }
  }
  return est;
}

Assumption2Report verify_assumption2(DenoiserKind const &kind,
                                     DenoiserBoundEstimate const &estimate,
                                     std::size_t n_holdout,
                                     std::uint64_t seed,
                                     double margin)
{
  check_grid(estimate.sigma_grid);
  if (margin < 0.0) {
    throw InvalidArgument("verify_assumption2: margin must be nonnegative");
  }
  Assumption2Report report;
  report.threshold = estimate.k_hat * (1.0 + margin);
  for (std::size_t i = 0; i < n_holdout; ++i) {
    Rng rng = substream(seed, i);
    ImageGrid const img = uniform_image(rng, estimate.shape);
    for (double const s : estimate.sigma_grid) {
      double const ratio = residue_ratio(kind, s, img);
      report.worst_ratio = std::max(report.worst_ratio, ratio);
      if (ratio > report.threshold) {
        ++report.violations;
      }
      ++report.checked;
    }
  }
  return report;
}

} // namespace pnp
