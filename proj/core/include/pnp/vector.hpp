#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pnp {

/// Dense vector in R^d. Entries are finite and d >= 1; both are checked on
/// construction, so a value of this type never carries NaN or infinity.
class RealVector
{
public:
  explicit RealVector(std::vector<double> data);

  static RealVector zeros(std::size_t dim);
  static RealVector constant(std::size_t dim, double value);
  static RealVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<const double> values() const noexcept { return data_; }
  std::vector<double> const &storage() const noexcept { return data_; }

  friend bool operator==(RealVector const &, RealVector const &) = default;

private:
  std::vector<double> data_;
};

double euclidean_norm(RealVector const &v);
double euclidean_norm(std::span<const double> v);
double dot(RealVector const &a, RealVector const &b);
/// ||a - b||
double distance(RealVector const &a, RealVector const &b);

RealVector operator+(RealVector const &a, RealVector const &b);
RealVector operator-(RealVector const &a, RealVector const &b);
RealVector operator*(double s, RealVector const &a);

/// The ADMM state theta = (x, v, u).
class IterateTriple
{
public:
  IterateTriple(RealVector x, RealVector v, RealVector u);

  RealVector const &x() const noexcept { return x_; }
  RealVector const &v() const noexcept { return v_; }
  RealVector const &u() const noexcept { return u_; }
  std::size_t dim() const noexcept { return x_.dim(); }

  friend bool operator==(IterateTriple const &, IterateTriple const &) = default;

private:
  RealVector x_;
  RealVector v_;
  RealVector u_;
};

/// D(a, b) = (||x_a - x_b|| + ||v_a - v_b|| + ||u_a - u_b||) / sqrt(d).
double metric_distance(IterateTriple const &a, IterateTriple const &b);

} // namespace pnp
