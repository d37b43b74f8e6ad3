#pragma once

#include "pnp/denoisers.hpp"
#include "pnp/fidelity.hpp"
#include "pnp/vector.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace pnp {

struct SolverConfig
{
  double lambda = 0.01;
  double rho0 = 1.0;
  double gamma = 1.05;
  double eta = 0.6;
  std::size_t max_iter = 100;
  double delta_tol = 1e-6;
  std::uint64_t seed = 0;
  /// Keep every iterate in RunTrace::snapshots.
  bool keep_snapshots = false;

  /// Throws InvalidArgument unless gamma > 1, 0 < eta < 1, lambda > 0, rho0 > 0, max_iter >= 1.
  void validate() const;
};

/// Branch of the penalty rule: C1 grows rho, C2 holds it.
enum class ConditionFlag
{
  C1,
  C2
};

std::string_view to_string(ConditionFlag flag);

struct PenaltyUpdate
{
  double rho_next;
  ConditionFlag flag;
};

/// rho_{k+1} = gamma * rho_k if delta_next >= eta * delta_prev (C1), else rho_k (C2).
PenaltyUpdate update_rho(double rho, double delta_next, double delta_prev, double gamma, double eta);

/// One row of the run trace.
///
/// Record k describes the step theta_{k-1} -> theta_k: `delta` is
/// D(theta_{k-1}, theta_k), `condition` is the penalty-rule branch taken by
/// comparing delta_k with delta_{k-1} (absent for k = 1), and `rho`/`sigma`
/// are the values that rule produced, i.e. the ones the next step uses.
struct TraceRecord
{
  std::size_t iter = 0;
  double delta = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
  std::optional<ConditionFlag> condition;
  double fidelity_value = 0.0;

  friend bool operator==(TraceRecord const &, TraceRecord const &) = default;
};

enum class StopReason
{
  tolerance,
  max_iter
};

std::string_view to_string(StopReason reason);

struct RunTrace
{
  std::vector<TraceRecord> records;
  IterateTriple final_iterate;
  StopReason stop_reason = StopReason::max_iter;
  /// theta_0, theta_1, ... when SolverConfig::keep_snapshots is set.
  std::vector<IterateTriple> snapshots;
};

/// Called after every iteration with (k, theta_k).
using IterationObserver = std::function<void(std::size_t, IterateTriple const &)>;

/// One PnP-ADMM step at fixed (rho, sigma):
///   x' = prox(v - u), v' = D_sigma(x' + u), u' = u + x' - v'.
IterateTriple step(FidelityTerm const &f, DenoiserKind const &kind, double rho, double sigma, IterateTriple const &theta);

/// Runs the adaptive-penalty iteration until delta < delta_tol or max_iter.
/// Throws NonFiniteError naming the iteration if an iterate blows up.
RunTrace run(FidelityTerm const &f,
             DenoiserKind const &kind,
             SolverConfig const &cfg,
             IterateTriple const &theta0,
             IterationObserver const &observer = {});

/// (H^T b, H^T b, 0)
IterateTriple backprojection_start(FidelityTerm const &f);

struct FixedPointReport
{
  double residual = 0.0;
};

/// D(theta_final, T(theta_final)) with T one step at the trace's final (rho, sigma).
FixedPointReport fixed_point_residual(FidelityTerm const &f, DenoiserKind const &kind, RunTrace const &trace);

} // namespace pnp
