#include "pnp/solver.hpp"

#include "pnp/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pnp {

void SolverConfig::validate() const
{
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument(fmt::format("lambda must be positive, got {}", lambda));
  }
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
    throw InvalidArgument(fmt::format("rho0 must be positive, got {}", rho0));
  }
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw InvalidArgument(fmt::format("gamma must exceed 1, got {}", gamma));
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw InvalidArgument(fmt::format("eta must lie in (0, 1), got {}", eta));
  }
  if (max_iter == 0) {
    throw InvalidArgument("max_iter must be at least 1");
  }
  if (!(delta_tol >= 0.0)) {
    throw InvalidArgument(fmt::format("delta_tol must be nonnegative, got {}", delta_tol));
  }
}

std::string_view to_string(ConditionFlag flag) { return flag == ConditionFlag::C1 ? "C1" : "C2"; }

std::string_view to_string(StopReason reason) { return reason == StopReason::tolerance ? "tolerance" : "max_iter"; }

PenaltyUpdate update_rho(double rho, double delta_next, double delta_prev, double gamma, double eta)
{
  if (delta_next >= eta * delta_prev) {
    return {gamma * rho, ConditionFlag::C1};
  }
  return {rho, ConditionFlag::C2};
}

IterateTriple step(FidelityTerm const &f, DenoiserKind const &kind, double rho, double sigma, IterateTriple const &theta)
{
  if (!(sigma > 0.0)) {
    throw InvalidArgument(fmt::format("step: sigma must be positive, got {}", sigma));
  }
  ImageShape const shape = f.op().input_shape();
  RealVector x = prox_x_update(f, rho, theta.v() - theta.u());
  RealVector v = denoise(kind, sigma, ImageGrid(shape, x + theta.u())).pixels();
  RealVector u = theta.u() + x - v;
  return IterateTriple(std::move(x), std::move(v), std::move(u));
}

IterateTriple backprojection_start(FidelityTerm const &f)
{
  RealVector const bp = f.op().apply_adjoint(f.observation());
  return IterateTriple(bp, bp, RealVector::zeros(bp.dim()));
}

RunTrace run(FidelityTerm const &f,
             DenoiserKind const &kind,
             SolverConfig const &cfg,
             IterateTriple const &theta0,
             IterationObserver const &observer)
{
  cfg.validate();
  if (theta0.dim() != f.dim()) {
    throw DimensionError(fmt::format("run: initial iterate has dimension {}, problem has {}", theta0.dim(), f.dim()));
  }

  RunTrace trace{{}, theta0, StopReason::max_iter, {}};
  if (cfg.keep_snapshots) {
    trace.snapshots.push_back(theta0);
  }

  IterateTriple theta = theta0;
  double rho = cfg.rho0;
  double prev_delta = 0.0;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    double const sigma = std::sqrt(cfg.lambda / rho);
    std::optional<IterateTriple> next;
    try {
      next.emplace(step(f, kind, rho, sigma, theta));
    } catch (NonFiniteError const &e) {
      throw NonFiniteError(fmt::format("iteration {}: {}", k, e.what()));
    }
    double const delta = metric_distance(theta, *next);

    TraceRecord rec;
    rec.iter = k;
    rec.delta = delta;
    // No delta_0 exists, so the first step leaves rho unchanged.
    if (k >= 2) {
      auto const upd = update_rho(rho, delta, prev_delta, cfg.gamma, cfg.eta);
      rho = upd.rho_next;
      rec.condition = upd.flag;
    }
    if (!std::isfinite(rho)) {
      throw NonFiniteError(fmt::format("iteration {}: penalty parameter overflowed", k));
    }
    rec.rho = rho;
    rec.sigma = std::sqrt(cfg.lambda / rho);
    rec.fidelity_value = f.value(next->x());
    trace.records.push_back(rec);

    theta = std::move(*next);
    if (cfg.keep_snapshots) {
      trace.snapshots.push_back(theta);
    }
    if (observer) {
      observer(k, theta);
    }
    prev_delta = delta;
    if (delta < cfg.delta_tol) {
      trace.stop_reason = StopReason::tolerance;
      break;
    }
  }
  trace.final_iterate = std::move(theta);
  return trace;
}

FixedPointReport fixed_point_residual(FidelityTerm const &f, DenoiserKind const &kind, RunTrace const &trace)
{
  if (trace.records.empty()) {
    throw InvalidArgument("fixed_point_residual: empty trace");
  }
  auto const &last = trace.records.back();
  IterateTriple const next = step(f, kind, last.rho, last.sigma, trace.final_iterate);
  return {metric_distance(trace.final_iterate, next)};
}

} // namespace pnp
