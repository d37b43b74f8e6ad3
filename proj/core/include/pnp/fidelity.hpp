#pragma once

#include "pnp/errors.hpp"
#include "pnp/image.hpp"
#include "pnp/vector.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pnp {

/// Matrix-free linear operator H acting on row-major images.
class ForwardOperator
{
public:
  struct Identity
  {
  };
  /// Periodic convolution with a centred stencil.
  struct CircularBlur
  {
    Stencil kernel;
  };
  /// Zeroes pixels with keep[i] == false. Output has the input's shape.
  struct Mask
  {
    std::vector<bool> keep;
  };
  /// Circular prefilter followed by keeping every factor-th row and column.
  struct Downsample
  {
    std::size_t factor;
    Stencil prefilter;
  };

  static ForwardOperator identity(ImageShape shape);
  static ForwardOperator circular_blur(ImageShape shape, Stencil kernel);
  static ForwardOperator mask(ImageShape shape, std::vector<bool> keep);
  /// Prefilter defaults to the binomial stencil of side 2*factor - 1.
  static ForwardOperator downsample(ImageShape shape, std::size_t factor, std::optional<Stencil> prefilter = {});

  ImageShape input_shape() const noexcept { return in_; }
  ImageShape output_shape() const noexcept { return out_; }
  std::size_t input_dim() const noexcept { return in_.size(); }
  std::size_t output_dim() const noexcept { return out_.size(); }
  std::string name() const;

  RealVector apply(RealVector const &x) const;
  RealVector apply_adjoint(RealVector const &y) const;

  /// Raw-buffer forms used by the solvers; sizes must already match.
  void apply_into(std::span<const double> x, std::span<double> y) const;
  void apply_adjoint_into(std::span<const double> y, std::span<double> x) const;

private:
  using Variant = std::variant<Identity, CircularBlur, Mask, Downsample>;
  ForwardOperator(Variant op, ImageShape in, ImageShape out);

  Variant op_;
  ImageShape in_;
  ImageShape out_;
};

inline RealVector apply(ForwardOperator const &op, RealVector const &x) { return op.apply(x); }

/// f(x) = 0.5 * ||Hx - b||^2
class FidelityTerm
{
public:
  FidelityTerm(ForwardOperator op, RealVector observation);

  ForwardOperator const &op() const noexcept { return op_; }
  RealVector const &observation() const noexcept { return b_; }
  std::size_t dim() const noexcept { return op_.input_dim(); }

  double value(RealVector const &x) const;

private:
  ForwardOperator op_;
  RealVector b_;
};

/// H^T (Hx - b)
RealVector gradient(FidelityTerm const &f, RealVector const &x);

class ProxSolveError : public Error
{
public:
  ProxSolveError(std::string const &what, double residual, std::size_t iterations)
    : Error(what)
    , residual_(residual)
    , iterations_(iterations)
  {
  }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

private:
  double residual_;
  std::size_t iterations_;
};

struct ProxOptions
{
  double rel_tol = 1e-10;
  /// 0 selects 10 * d.
  std::size_t max_iter = 0;
};

/// argmin_x f(x) + (rho/2) ||x - target||^2, i.e. the solution of
/// (H^T H + rho I) x = H^T b + rho * target, by conjugate gradients.
RealVector prox_x_update(FidelityTerm const &f, double rho, RealVector const &target, ProxOptions const &opts = {});

/// ||(H^T H + rho I) x - (H^T b + rho t)|| / ||H^T b + rho t||
double normal_equation_residual(FidelityTerm const &f, double rho, RealVector const &target, RealVector const &x);

struct GradientBoundEstimate
{
  double m_hat = 0.0;
  std::string region;
  std::size_t sample_count = 0;
};

/// m_hat = max over samples of ||grad f(x)|| / sqrt(d). This is an effective
/// bound on the sampled region only; the quadratic f has unbounded gradient.
GradientBoundEstimate estimate_assumption1_constant(FidelityTerm const &f,
                                                    std::span<const RealVector> samples,
                                                    std::string region = "supplied samples");

/// Running version of the estimator for streaming trajectories.
class GradientBoundAccumulator
{
public:
  explicit GradientBoundAccumulator(FidelityTerm const &f)
    : f_(&f)
  {
  }
  void add(RealVector const &x);
  GradientBoundEstimate result(std::string region) const;

private:
  FidelityTerm const *f_;
  double m_hat_ = 0.0;
  std::size_t count_ = 0;
};

} // namespace pnp
