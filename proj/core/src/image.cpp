#include "pnp/image.hpp"

#include "pnp/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace pnp {

ImageGrid::ImageGrid(ImageShape shape, RealVector pixels)
  : shape_(shape)
  , pixels_(std::move(pixels))
{
  if (shape_.width == 0 || shape_.height == 0) {
    throw DimensionError("ImageGrid: width and height must be positive");
  }
  if (pixels_.dim() != shape_.size()) {
    throw DimensionError(fmt::format("ImageGrid: {}x{} image needs {} pixels, got {}", shape_.width,
                                     shape_.height, shape_.size(), pixels_.dim()));
  }
}

Stencil::Stencil(std::size_t rows, std::size_t cols, std::vector<double> weights)
  : rows_(rows)
  , cols_(cols)
  , weights_(std::move(weights))
{
  if (rows_ % 2 == 0 || cols_ % 2 == 0) {
    throw InvalidArgument(fmt::format("Stencil: side lengths must be odd, got {}x{}", rows_, cols_));
  }
  if (weights_.size() != rows_ * cols_) {
    throw InvalidArgument(
      fmt::format("Stencil: expected {} weights, got {}", rows_ * cols_, weights_.size()));
  }
  for (double const w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("Stencil: weights must be finite and nonnegative");
    }
  }
  double const total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument(fmt::format("Stencil: weights sum to {:.17g}, expected 1", total));
  }
}

Stencil Stencil::averaging(std::size_t n)
{
  double const w = 1.0 / static_cast<double>(n * n);
  return Stencil(n, n, std::vector<double>(n * n, w));
}

Stencil Stencil::binomial(std::size_t n)
{
  if (n % 2 == 0) {
    throw InvalidArgument(fmt::format("binomial stencil length must be odd, got {}", n));
  }
  std::vector<double> row(n, 0.0);
  row[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t j = k; j > 0; --j) {
      row[j] += row[j - 1];
    }
  }
  double const total = std::ldexp(1.0, static_cast<int>(n - 1));
  std::vector<double> w(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      w[r * n + c] = (row[r] / total) * (row[c] / total);
    }
  }
  return Stencil(n, n, std::move(w));
}

std::size_t reflect_index(long long i, std::size_t n)
{
  auto const period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) {
    m += period;
  }
  if (m >= static_cast<long long>(n)) {
    m = period - 1 - m;
  }
  return static_cast<std::size_t>(m);
}

std::size_t wrap_index(long long i, std::size_t n)
{
  auto const nn = static_cast<long long>(n);
  long long m = i % nn;
  if (m < 0) {
    m += nn;
  }
  return static_cast<std::size_t>(m);
}

} // namespace pnp
