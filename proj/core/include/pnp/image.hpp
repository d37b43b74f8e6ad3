#pragma once

#include "pnp/vector.hpp"

#include <cstddef>
#include <vector>

namespace pnp {

struct ImageShape
{
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t size() const noexcept { return width * height; }
  friend bool operator==(ImageShape const &, ImageShape const &) = default;
};

/// Row-major grayscale image with nominal intensities in [0, 1].
class ImageGrid
{
public:
  ImageGrid(ImageShape shape, RealVector pixels);

  ImageShape shape() const noexcept { return shape_; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t height() const noexcept { return shape_.height; }
  RealVector const &pixels() const noexcept { return pixels_; }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * shape_.width + col]; }

  friend bool operator==(ImageGrid const &, ImageGrid const &) = default;

private:
  ImageShape shape_;
  RealVector pixels_;
};

/// Small centred 2-D filter with odd side lengths, nonnegative weights that
/// sum to one.
class Stencil
{
public:
  Stencil(std::size_t rows, std::size_t cols, std::vector<double> weights);

  /// n x n box with equal weights.
  static Stencil averaging(std::size_t n);
  /// Outer product of the 1-D binomial row of length n (n odd).
  static Stencil binomial(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t center_row() const noexcept { return rows_ / 2; }
  std::size_t center_col() const noexcept { return cols_ / 2; }
  double operator()(std::size_t r, std::size_t c) const { return weights_[r * cols_ + c]; }
  std::vector<double> const &weights() const noexcept { return weights_; }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> weights_;
};

/// Half-sample symmetric reflection of an arbitrary offset into [0, n).
/// Repeats as often as needed, so filters wider than the image are fine.
std::size_t reflect_index(long long i, std::size_t n);

/// Circular wrap of an arbitrary offset into [0, n).
std::size_t wrap_index(long long i, std::size_t n);

} // namespace pnp
