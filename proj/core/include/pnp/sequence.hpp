#pragma once

#include "pnp/errors.hpp"
#include "pnp/solver.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pnp {

/// Piecewise geometric sequence.
///
/// Indices are 1-based. The terms y_1 .. y_{n_1} are the free `head`; for
/// j >= 1 the chunk y_{n_j + 1} .. y_{n_{j+1}} is geometric with rate beta and
/// starts at the peak y_{n_j + 1} = peak0 * beta^(j-1).
///
/// Boundaries past the end of `chunk_starts` continue with unit-length chunks,
/// so the tail is plain geometric. n_1 = 0 (no head) is allowed.
struct PgsSpec
{
  double beta = 0.5;
  double peak0 = 1.0;
  std::vector<std::size_t> chunk_starts;
  /// Either empty (head terms equal peak0) or exactly n_1 entries.
  std::vector<double> head;

  void validate() const;
  /// n_j for j >= 1, extended past the listed boundaries.
  std::size_t chunk_start(std::size_t j) const;
  /// y_1 + ... + y_{n_1}
  double head_sum() const;
};

std::vector<double> pgs_generate(PgsSpec const &spec, std::size_t length);

/// peak0 * beta^(j-1) / (1 - beta); strictly exceeds the sum of chunk j.
double pgs_chunk_sum_bound(PgsSpec const &spec, std::size_t j);

/// head_sum + peak0 / (1 - beta)^2; bounds every partial sum.
double pgs_partial_sum_bound(PgsSpec const &spec);

/// Index past which every tail sum of a PGS stays below epsilon.
struct CauchyCertificate
{
  double epsilon = 0.0;
  /// Smallest K >= 1 with beta^(K-1) < epsilon (1 - beta)^2 / A.
  std::size_t k_index = 0;
  /// N = n_K + 1
  std::size_t n_start = 0;
  /// A beta^(K-1) / (1 - beta)^2
  double tail_bound = 0.0;
};

CauchyCertificate cauchy_index(double peak0, double beta, double epsilon, std::span<const std::size_t> chunk_starts);
CauchyCertificate cauchy_index(PgsSpec const &spec, double epsilon);

class TraceInvariantError : public Error
{
public:
  using Error::Error;
};

/// The residual/penalty history the bounds are built from.
///
/// Entry i (0-based) mirrors trace record i+1: deltas[i] = delta_{i+1},
/// rhos[i] = rho_{i+1}, flags[i] the branch that produced rhos[i].
/// condition_at(k) is therefore the rule comparing delta_{k+1} with delta_k.
struct ConditionTrace
{
  std::vector<std::optional<ConditionFlag>> flags;
  std::vector<double> deltas;
  std::vector<double> rhos;
  double gamma = 1.05;
  double eta = 0.6;

  static ConditionTrace from_records(std::span<const TraceRecord> records, double gamma, double eta);

  std::size_t size() const noexcept { return deltas.size(); }
  /// Number of iterations carrying a condition flag.
  std::size_t condition_count() const noexcept { return deltas.empty() ? 0 : deltas.size() - 1; }
  double delta(std::size_t k) const { return deltas.at(k - 1); }
  double rho(std::size_t k) const { return rhos.at(k - 1); }
  /// Branch at iteration k, 1 <= k <= condition_count().
  ConditionFlag condition_at(std::size_t k) const;

  /// Throws TraceInvariantError naming the first violated invariant.
  void validate() const;
};

/// c_hat = max over C1 iterations k of delta_{k+1} * sqrt(rho_k), so that
/// delta_{k+1} <= c_hat / sqrt(rho_k) at every C1 iteration.
double estimate_lemma1_constant(ConditionTrace const &trace);

/// PGS majorant for a trace that keeps switching between C1 and C2.
struct PgsBound
{
  PgsSpec spec;
  double c_used = 0.0;
  /// First C1 iteration.
  std::size_t n1 = 0;
  /// n_1 < n_2 < ... : C1 onsets.
  std::vector<std::size_t> c1_onsets;
  /// m_1 < m_2 < ... : C2 onsets, interleaved n_1 < m_1 < n_2 < m_2 < ...
  std::vector<std::size_t> c2_onsets;
  std::size_t horizon = 0;

  /// y_1 .. y_horizon
  std::vector<double> values() const { return pgs_generate(spec, horizon); }
};

class BoundConstructionError : public Error
{
public:
  using Error::Error;
};

/// Builds the PGS with rate max(1/sqrt(gamma), eta) and peaks
/// c rho_{n_1}^{-1/2} beta^(j-1) at the C1 onsets. Head terms copy the
/// observed deltas. Needs at least two C1 -> C2 switches.
PgsBound construct_s3_bound(ConditionTrace const &trace, double c);

enum class CaseLabel
{
  S1Like,
  S2Like,
  S3Like
};

std::string to_string(CaseLabel label);

/// Eventual geometric majorant delta_{k+1} <= A beta^k for k >= n.
struct GeometricBound
{
  CaseLabel label = CaseLabel::S1Like;
  double A = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
  /// Bound on delta_{n+1}, i.e. A beta^n; kept separately since A itself
  /// can overflow when n is large and beta small.
  double anchor = 0.0;

  /// delta_1 .. delta_n copied, then anchor * beta^(k-1-n).
  std::vector<double> values(ConditionTrace const &trace) const;
  /// The same majorant as a PGS with unit chunks from n on.
  PgsSpec as_pgs(ConditionTrace const &trace) const;
};

/// Geometric majorant for a trace whose final window is single-condition.
/// All-C1 tail: beta = 1/sqrt(gamma). All-C2 tail: beta = eta. `c` is required
/// whenever the bound anchors on a C1 iteration.
GeometricBound construct_s12_bound(ConditionTrace const &trace, std::optional<double> c, std::size_t window);

struct CaseClassification
{
  CaseLabel label;
  std::string caveat;
};

/// Heuristic label from the last `window` condition flags. A finite trace can
/// never establish which case holds asymptotically; the caveat says so.
CaseClassification classify_case(ConditionTrace const &trace, std::size_t window);

struct BoundCheck
{
  bool holds = true;
  double worst_margin = 0.0;
  /// 1-based index of the worst margin, 0 if nothing was checked.
  std::size_t worst_index = 0;
};

/// Relative slack for pointwise bound checks; covers rounding only.
inline constexpr double kBoundTolerance = 1e-12;

/// holds iff delta_k <= y_k (1 + 1e-12) for every k >= start (1-based).
BoundCheck verify_bound(std::span<const double> deltas, std::span<const double> bound, std::size_t start);

} // namespace pnp
