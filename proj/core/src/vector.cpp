#include "pnp/vector.hpp"

#include "pnp/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pnp {

namespace {

void require_same_dim(RealVector const &a, RealVector const &b, char const *what)
{
  if (a.dim() != b.dim()) {
    throw DimensionError(fmt::format("{}: dimension mismatch ({} vs {})", what, a.dim(), b.dim()));
  }
}

} // namespace

RealVector::RealVector(std::vector<double> data)
  : data_(std::move(data))
{
  if (data_.empty()) {
    throw DimensionError("RealVector: dimension must be at least 1");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw NonFiniteError(fmt::format("RealVector: entry {} is not finite ({})", i, data_[i]));
    }
  }
}

RealVector RealVector::zeros(std::size_t dim) { return RealVector(std::vector<double>(dim, 0.0)); }

RealVector RealVector::constant(std::size_t dim, double value)
{
  return RealVector(std::vector<double>(dim, value));
}

RealVector RealVector::basis(std::size_t dim, std::size_t index)
{
  if (index >= dim) {
    throw InvalidArgument(fmt::format("basis index {} out of range for dimension {}", index, dim));
  }
  std::vector<double> e(dim, 0.0);
  e[index] = 1.0;
  return RealVector(std::move(e));
}

double euclidean_norm(std::span<const double> v)
{
  double sum = 0.0;
  for (double const x : v) {
    sum += x * x;
  }
  return std::sqrt(sum);
}

double euclidean_norm(RealVector const &v) { return euclidean_norm(v.values()); }

double dot(RealVector const &a, RealVector const &b)
{
  require_same_dim(a, b, "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

double distance(RealVector const &a, RealVector const &b)
{
  require_same_dim(a, b, "distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double const t = a[i] - b[i];
    sum += t * t;
  }
  return std::sqrt(sum);
}

RealVector operator+(RealVector const &a, RealVector const &b)
{
  require_same_dim(a, b, "operator+");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a[i] + b[i];
  }
  return RealVector(std::move(out));
}

RealVector operator-(RealVector const &a, RealVector const &b)
{
  require_same_dim(a, b, "operator-");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a[i] - b[i];
  }
  return RealVector(std::move(out));
}

RealVector operator*(double s, RealVector const &a)
{
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = s * a[i];
  }
  return RealVector(std::move(out));
}

IterateTriple::IterateTriple(RealVector x, RealVector v, RealVector u)
  : x_(std::move(x))
  , v_(std::move(v))
  , u_(std::move(u))
{
  if (v_.dim() != x_.dim()) {
    throw DimensionError(fmt::format("IterateTriple: v has dimension {}, x has {}", v_.dim(), x_.dim()));
  }
  if (u_.dim() != x_.dim()) {
    throw DimensionError(fmt::format("IterateTriple: u has dimension {}, x has {}", u_.dim(), x_.dim()));
  }
}

double metric_distance(IterateTriple const &a, IterateTriple const &b)
{
  if (a.x().dim() != b.x().dim()) {
    throw DimensionError(fmt::format("metric_distance: x components differ in dimension ({} vs {})",
                                     a.x().dim(), b.x().dim()));
  }
  if (a.v().dim() != b.v().dim()) {
    throw DimensionError(fmt::format("metric_distance: v components differ in dimension ({} vs {})",
                                     a.v().dim(), b.v().dim()));
  }
  if (a.u().dim() != b.u().dim()) {
    throw DimensionError(fmt::format("metric_distance: u components differ in dimension ({} vs {})",
                                     a.u().dim(), b.u().dim()));
  }
  double const sum = distance(a.x(), b.x()) + distance(a.v(), b.v()) + distance(a.u(), b.u());
  return sum / std::sqrt(static_cast<double>(a.dim()));
}

} // namespace pnp
