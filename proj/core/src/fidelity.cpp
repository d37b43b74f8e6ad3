#include "pnp/fidelity.hpp"

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

// y = k * x, periodic boundaries.
void circular_convolve(Stencil const &k, ImageShape shape, std::span<const double> x, std::span<double> y)
{
  std::size_t const w = shape.width;
  std::size_t const h = shape.height;
  auto const cr = static_cast<long long>(k.center_row());
  auto const cc = static_cast<long long>(k.center_col());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::size_t a = 0; a < k.rows(); ++a) {
        std::size_t const sr = wrap_index(static_cast<long long>(r) + cr - static_cast<long long>(a), h);
        for (std::size_t b = 0; b < k.cols(); ++b) {
          std::size_t const sc = wrap_index(static_cast<long long>(c) + cc - static_cast<long long>(b), w);
          acc += k(a, b) * x[sr * w + sc];
        }
      }
      y[r * w + c] = acc;
    }
  }
}

// Adjoint of circular_convolve: correlation with k.
void circular_correlate(Stencil const &k, ImageShape shape, std::span<const double> y, std::span<double> x)
{
  std::size_t const w = shape.width;
  std::size_t const h = shape.height;
  auto const cr = static_cast<long long>(k.center_row());
  auto const cc = static_cast<long long>(k.center_col());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::size_t a = 0; a < k.rows(); ++a) {
        std::size_t const sr = wrap_index(static_cast<long long>(r) - cr + static_cast<long long>(a), h);
        for (std::size_t b = 0; b < k.cols(); ++b) {
          std::size_t const sc = wrap_index(static_cast<long long>(c) - cc + static_cast<long long>(b), w);
          acc += k(a, b) * y[sr * w + sc];
        }
      }
      x[r * w + c] = acc;
    }
  }
}

void check_dim(std::size_t got, std::size_t want, char const *what)
{
  if (got != want) {
    throw DimensionError(fmt::format("{}: expected dimension {}, got {}", what, want, got));
  }
}

} // namespace

ForwardOperator::ForwardOperator(Variant op, ImageShape in, ImageShape out)
  : op_(std::move(op))
  , in_(in)
  , out_(out)
{
  if (in_.size() == 0 || out_.size() == 0) {
    throw DimensionError("ForwardOperator: empty input or output shape");
  }
}

ForwardOperator ForwardOperator::identity(ImageShape shape) { return {Identity{}, shape, shape}; }

ForwardOperator ForwardOperator::circular_blur(ImageShape shape, Stencil kernel)
{
  return {CircularBlur{std::move(kernel)}, shape, shape};
}

ForwardOperator ForwardOperator::mask(ImageShape shape, std::vector<bool> keep)
{
  if (keep.size() != shape.size()) {
    throw DimensionError(fmt::format("mask has {} entries, image has {} pixels", keep.size(), shape.size()));
  }
  return {Mask{std::move(keep)}, shape, shape};
}

ForwardOperator ForwardOperator::downsample(ImageShape shape, std::size_t factor, std::optional<Stencil> prefilter)
{
  if (factor == 0) {
    throw InvalidArgument("downsample factor must be positive");
  }
  if (shape.width % factor != 0 || shape.height % factor != 0) {
    throw DimensionError(
      fmt::format("{}x{} image is not divisible by downsample factor {}", shape.width, shape.height, factor));
  }
  Stencil pf = prefilter ? std::move(*prefilter) : Stencil::binomial(2 * factor - 1);
  ImageShape const out{shape.width / factor, shape.height / factor};
  return {Downsample{factor, std::move(pf)}, shape, out};
}

std::string ForwardOperator::name() const
{
  return std::visit(overloaded{[](Identity const &) -> std::string { return "identity"; },
                               [](CircularBlur const &b) -> std::string {
                                 return fmt::format("circular-blur({}x{})", b.kernel.rows(), b.kernel.cols());
                               },
                               [](Mask const &) -> std::string { return "mask"; },
                               [](Downsample const &d) -> std::string {
                                 return fmt::format("downsample(x{})", d.factor);
                               }},
                    op_);
}

void ForwardOperator::apply_into(std::span<const double> x, std::span<double> y) const
{
  std::visit(overloaded{[&](Identity const &) { std::copy(x.begin(), x.end(), y.begin()); },
                        [&](CircularBlur const &b) { circular_convolve(b.kernel, in_, x, y); },
                        [&](Mask const &m) {
                          for (std::size_t i = 0; i < x.size(); ++i) {
                            y[i] = m.keep[i] ? x[i] : 0.0;
                          }
                        },
                        [&](Downsample const &d) {
                          std::vector<double> filtered(in_.size());
                          circular_convolve(d.prefilter, in_, x, filtered);
                          for (std::size_t r = 0; r < out_.height; ++r) {
                            for (std::size_t c = 0; c < out_.width; ++c) {
                              y[r * out_.width + c] = filtered[(r * d.factor) * in_.width + c * d.factor];
                            }
                          }
                        }},
             op_);
}

void ForwardOperator::apply_adjoint_into(std::span<const double> y, std::span<double> x) const
{
  std::visit(overloaded{[&](Identity const &) { std::copy(y.begin(), y.end(), x.begin()); },
                        [&](CircularBlur const &b) { circular_correlate(b.kernel, in_, y, x); },
                        [&](Mask const &m) {
                          for (std::size_t i = 0; i < y.size(); ++i) {
                            x[i] = m.keep[i] ? y[i] : 0.0;
                          }
                        },
                        [&](Downsample const &d) {
                          std::vector<double> up(in_.size(), 0.0);
                          for (std::size_t r = 0; r < out_.height; ++r) {
                            for (std::size_t c = 0; c < out_.width; ++c) {
                              up[(r * d.factor) * in_.width + c * d.factor] = y[r * out_.width + c];
                            }
                          }
                          circular_correlate(d.prefilter, in_, up, x);
                        }},
             op_);
}

RealVector ForwardOperator::apply(RealVector const &x) const
{
  check_dim(x.dim(), input_dim(), "ForwardOperator::apply");
  std::vector<double> y(output_dim());
  apply_into(x.values(), y);
  return RealVector(std::move(y));
}

RealVector ForwardOperator::apply_adjoint(RealVector const &y) const
{
  check_dim(y.dim(), output_dim(), "ForwardOperator::apply_adjoint");
  std::vector<double> x(input_dim());
  apply_adjoint_into(y.values(), x);
  return RealVector(std::move(x));
}

FidelityTerm::FidelityTerm(ForwardOperator op, RealVector observation)
  : op_(std::move(op))
  , b_(std::move(observation))
{
  check_dim(b_.dim(), op_.output_dim(), "FidelityTerm observation");
}

double FidelityTerm::value(RealVector const &x) const
{
  double const r = distance(op_.apply(x), b_);
  return 0.5 * r * r;
}

RealVector gradient(FidelityTerm const &f, RealVector const &x)
{
  check_dim(x.dim(), f.dim(), "gradient");
  return f.op().apply_adjoint(f.op().apply(x) - f.observation());
}

namespace {

class NormalMatrix
{
public:
  NormalMatrix(ForwardOperator const &op, double rho)
    : op_(op)
    , rho_(rho)
    , scratch_(op.output_dim())
  {
  }

  // y = (H^T H + rho I) x
  void operator()(std::span<const double> x, std::span<double> y)
  {
    op_.apply_into(x, scratch_);
    op_.apply_adjoint_into(scratch_, y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] += rho_ * x[i];
    }
  }

private:
  ForwardOperator const &op_;
  double rho_;
  std::vector<double> scratch_;
};

std::vector<double> normal_rhs(FidelityTerm const &f, double rho, RealVector const &target)
{
  std::vector<double> rhs(f.dim());
  f.op().apply_adjoint_into(f.observation().values(), rhs);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] += rho * target[i];
  }
  return rhs;
}

} // namespace

RealVector prox_x_update(FidelityTerm const &f, double rho, RealVector const &target, ProxOptions const &opts)
{
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument(fmt::format("prox_x_update: rho must be positive, got {}", rho));
  }
  check_dim(target.dim(), f.dim(), "prox_x_update target");

  std::size_t const d = f.dim();
  std::size_t const cap = opts.max_iter == 0 ? 10 * d : opts.max_iter;
  NormalMatrix A(f.op(), rho);
  std::vector<double> const b = normal_rhs(f, rho, target);
  double const b_norm = euclidean_norm(b);
  if (b_norm == 0.0) {
    return RealVector::zeros(d);
  }

  // Warm start at the target; exact when H^T H x = H^T b there.
  std::vector<double> x = target.storage();
  std::vector<double> r(d), p(d), Ap(d);
  A(x, Ap);
  for (std::size_t i = 0; i < d; ++i) {
    r[i] = b[i] - Ap[i];
  }
  p = r;
  double rr = 0.0;
  for (double const ri : r) {
    rr += ri * ri;
  }
  double const tol = opts.rel_tol * b_norm;

  std::size_t it = 0;
  while (std::sqrt(rr) > tol) {
    if (it == cap) {
      throw ProxSolveError(fmt::format("prox_x_update: CG did not converge in {} iterations (relative residual {:.3e})",
                                       cap, std::sqrt(rr) / b_norm),
                           std::sqrt(rr) / b_norm, it);
    }
    A(p, Ap);
    double pAp = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      pAp += p[i] * Ap[i];
    }
    double const alpha = rr / pAp;
    double rr_next = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rr_next += r[i] * r[i];
    }
    double const beta = rr_next / rr;
    for (std::size_t i = 0; i < d; ++i) {
      p[i] = r[i] + beta * p[i];
    }
    rr = rr_next;
    ++it;
  }
  return RealVector(std::move(x));
}

double normal_equation_residual(FidelityTerm const &f, double rho, RealVector const &target, RealVector const &x)
{
  check_dim(x.dim(), f.dim(), "normal_equation_residual");
  NormalMatrix A(f.op(), rho);
  std::vector<double> const b = normal_rhs(f, rho, target);
  std::vector<double> Ax(f.dim());
  A(x.values(), Ax);
  for (std::size_t i = 0; i < Ax.size(); ++i) {
    Ax[i] -= b[i];
  }
  double const b_norm = euclidean_norm(b);
  double const r = euclidean_norm(Ax);
  return b_norm > 0.0 ? r / b_norm : r;
}

void GradientBoundAccumulator::add(RealVector const &x)
{
  double const g = euclidean_norm(gradient(*f_, x)) / std::sqrt(static_cast<double>(f_->dim()));
  m_hat_ = std::max(m_hat_, g);
  ++count_;
}

GradientBoundEstimate GradientBoundAccumulator::result(std::string region) const
{
  return {m_hat_, std::move(region), count_};
}

GradientBoundEstimate estimate_assumption1_constant(FidelityTerm const &f,
                                                    std::span<const RealVector> samples,
                                                    std::string region)
{
  if (samples.empty()) {
    throw InvalidArgument("estimate_assumption1_constant: no samples");
  }
  GradientBoundAccumulator acc(f);
  for (auto const &x : samples) {
    acc.add(x);
  }
  return acc.result(std::move(region));
}

} // namespace pnp
