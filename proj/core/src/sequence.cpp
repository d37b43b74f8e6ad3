#include "pnp/sequence.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pnp {

namespace {

void check_rate(double beta)
{
  if (!(beta > 0.0 && beta < 1.0)) {
    throw InvalidArgument(fmt::format("PGS rate must lie in (0, 1), got {}", beta));
  }
}

std::size_t extended_start(std::span<const std::size_t> starts, std::size_t j)
{
  if (j == 0) {
    throw InvalidArgument("chunk index is 1-based");
  }
  if (starts.empty()) {
    return j - 1;
  }
  if (j <= starts.size()) {
    return starts[j - 1];
  }
  return starts.back() + (j - starts.size());
}

} // namespace

void PgsSpec::validate() const
{
  check_rate(beta);
  if (!(peak0 > 0.0) || !std::isfinite(peak0)) {
    throw InvalidArgument(fmt::format("PGS peak must be positive, got {}", peak0));
  }
  for (std::size_t i = 1; i < chunk_starts.size(); ++i) {
    if (chunk_starts[i] <= chunk_starts[i - 1]) {
      throw InvalidArgument(fmt::format("chunk starts must be strictly increasing ({} then {})",
                                        chunk_starts[i - 1], chunk_starts[i]));
    }
  }
  std::size_t const n1 = chunk_start(1);
  if (!head.empty() && head.size() != n1) {
    throw InvalidArgument(fmt::format("head has {} terms, first chunk starts after {}", head.size(), n1));
  }
  for (double const h : head) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw InvalidArgument(fmt::format("head terms must be finite and nonnegative, got {}", h));
    }
  }
}

std::size_t PgsSpec::chunk_start(std::size_t j) const { return extended_start(chunk_starts, j); }

double PgsSpec::head_sum() const
{
  if (head.empty()) {
    return peak0 * static_cast<double>(chunk_start(1));
  }
  return std::accumulate(head.begin(), head.end(), 0.0);
}

std::vector<double> pgs_generate(PgsSpec const &spec, std::size_t length)
{
  spec.validate();
  std::vector<double> y;
  y.reserve(length);
  std::size_t const n1 = spec.chunk_start(1);
  for (std::size_t k = 1; k <= std::min(length, n1); ++k) {
    y.push_back(spec.head.empty() ? spec.peak0 : spec.head[k - 1]);
  }
  for (std::size_t j = 1; y.size() < length; ++j) {
    std::size_t const begin = spec.chunk_start(j);
    std::size_t const end = spec.chunk_start(j + 1);
    double const peak = spec.peak0 * std::pow(spec.beta, static_cast<double>(j - 1));
    for (std::size_t k = begin + 1; k <= end && y.size() < length; ++k) {
      y.push_back(peak * std::pow(spec.beta, static_cast<double>(k - begin - 1)));
    }
  }
  return y;
}

double pgs_chunk_sum_bound(PgsSpec const &spec, std::size_t j)
{
  spec.validate();
  if (j == 0) {
    throw InvalidArgument("chunk index is 1-based");
  }
  return spec.peak0 * std::pow(spec.beta, static_cast<double>(j - 1)) / (1.0 - spec.beta);
}

double pgs_partial_sum_bound(PgsSpec const &spec)
{
  spec.validate();
  double const q = 1.0 - spec.beta;
  return spec.head_sum() + spec.peak0 / (q * q);
}

CauchyCertificate cauchy_index(double peak0, double beta, double epsilon, std::span<const std::size_t> chunk_starts)
{
  check_rate(beta);
  if (!(peak0 > 0.0) || !(epsilon > 0.0)) {
    throw InvalidArgument("cauchy_index: peak and epsilon must be positive");
  }
  double const q = 1.0 - beta;
  double const threshold = epsilon * q * q / peak0;
  auto const holds = [&](std::size_t K) { return std::pow(beta, static_cast<double>(K - 1)) < threshold; };

  // Jump near the answer with logs, then settle it by direct evaluation.
  std::size_t K = 1;
  if (threshold <= 1.0) {
    double const guess = std::log(threshold) / std::log(beta);
    K = static_cast<std::size_t>(std::max(1.0, std::floor(guess)));
  }
  while (!holds(K)) {
    ++K;
  }
  while (K > 1 && holds(K - 1)) {
    --K;
  }

  CauchyCertificate cert;
  cert.epsilon = epsilon;
  cert.k_index = K;
  cert.n_start = extended_start(chunk_starts, K) + 1;
  cert.tail_bound = peak0 * std::pow(beta, static_cast<double>(K - 1)) / (q * q);
  return cert;
}

CauchyCertificate cauchy_index(PgsSpec const &spec, double epsilon)
{
  spec.validate();
  return cauchy_index(spec.peak0, spec.beta, epsilon, spec.chunk_starts);
}

ConditionTrace ConditionTrace::from_records(std::span<const TraceRecord> records, double gamma, double eta)
{
  ConditionTrace t;
  t.gamma = gamma;
  t.eta = eta;
  for (auto const &r : records) {
    t.flags.push_back(r.condition);
    t.deltas.push_back(r.delta);
    t.rhos.push_back(r.rho);
  }
  return t;
}

ConditionFlag ConditionTrace::condition_at(std::size_t k) const
{
  if (k == 0 || k >= size()) {
    throw InvalidArgument(fmt::format("no condition recorded for iteration {}", k));
  }
  auto const &flag = flags[k];
  if (!flag) {
    throw TraceInvariantError(fmt::format("missing condition flag at record {}", k + 1));
  }
  return *flag;
}

void ConditionTrace::validate() const
{
  if (!(gamma > 1.0)) {
    throw TraceInvariantError(fmt::format("gamma must exceed 1, got {}", gamma));
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw TraceInvariantError(fmt::format("eta must lie in (0, 1), got {}", eta));
  }
  if (flags.size() != deltas.size() || rhos.size() != deltas.size()) {
    throw TraceInvariantError("flags, deltas and rhos differ in length");
  }
  if (deltas.empty()) {
    throw TraceInvariantError("empty trace");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(deltas[i] >= 0.0) || !std::isfinite(deltas[i])) {
      throw TraceInvariantError(fmt::format("record {}: delta must be finite and nonnegative", i + 1));
    }
    if (!(rhos[i] > 0.0) || !std::isfinite(rhos[i])) {
      throw TraceInvariantError(fmt::format("record {}: rho must be positive", i + 1));
    }
  }
  if (flags[0]) {
    throw TraceInvariantError("record 1 must not carry a condition flag");
  }
  for (std::size_t i = 1; i < size(); ++i) {
    if (!flags[i]) {
      throw TraceInvariantError(fmt::format("record {}: condition flag missing", i + 1));
    }
    ConditionFlag const expected = deltas[i] >= eta * deltas[i - 1] ? ConditionFlag::C1 : ConditionFlag::C2;
    if (*flags[i] != expected) {
      throw TraceInvariantError(fmt::format("record {}: condition flag inconsistent with deltas and eta (expected {})",
                                            i + 1, to_string(expected)));
    }
    if (expected == ConditionFlag::C1) {
      double const want = gamma * rhos[i - 1];
      if (std::abs(rhos[i] - want) > 1e-12 * want) {
        throw TraceInvariantError(fmt::format("record {}: rho must grow by gamma after C1", i + 1));
      }
    } else if (rhos[i] != rhos[i - 1]) {
      throw TraceInvariantError(fmt::format("record {}: rho must stay fixed after C2", i + 1));
    }
  }
}

double estimate_lemma1_constant(ConditionTrace const &trace)
{
  double c = 0.0;
  bool any = false;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace.condition_at(k) == ConditionFlag::C1) {
      c = std::max(c, trace.delta(k + 1) * std::sqrt(trace.rho(k)));
      any = true;
    }
  }
  if (!any) {
    throw BoundConstructionError("growth constant c is undefined on this trace: no C1 iterations");
  }
  return c;
}

PgsBound construct_s3_bound(ConditionTrace const &trace, double c)
{
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument(fmt::format("construct_s3_bound: c must be positive, got {}", c));
  }
  std::size_t const n = trace.size();
  if (n < 2) {
    throw BoundConstructionError("insufficient iterations for bound construction");
  }

  PgsBound bound;
  bound.c_used = c;
  bound.horizon = n;
  ConditionFlag want = ConditionFlag::C1;
  for (std::size_t k = 1; k < n; ++k) {
    if (trace.condition_at(k) != want) {
      continue;
    }
    if (want == ConditionFlag::C1) {
      bound.c1_onsets.push_back(k);
      want = ConditionFlag::C2;
    } else {
      bound.c2_onsets.push_back(k);
      want = ConditionFlag::C1;
    }
  }
  if (bound.c2_onsets.size() < 2) {
    throw BoundConstructionError(
      fmt::format("trace is S1/S2-like ({} C1->C2 switches, need 2); use geometric bound", bound.c2_onsets.size()));
  }

  bound.n1 = bound.c1_onsets.front();
  bound.spec.beta = std::max(1.0 / std::sqrt(trace.gamma), trace.eta);
  bound.spec.peak0 = c / std::sqrt(trace.rho(bound.n1));
  bound.spec.chunk_starts = bound.c1_onsets;
  // Close the last (open) chunk at the end of the trace.
  bound.spec.chunk_starts.push_back(n);
  bound.spec.head.assign(trace.deltas.begin(), trace.deltas.begin() + static_cast<std::ptrdiff_t>(bound.n1));
  return bound;
}

std::string to_string(CaseLabel label)
{
  switch (label) {
  case CaseLabel::S1Like:
    return "S1-like";
  case CaseLabel::S2Like:
    return "S2-like";
  case CaseLabel::S3Like:
    return "S3-like";
  }
  return "unknown";
}

CaseClassification classify_case(ConditionTrace const &trace, std::size_t window)
{
  if (window == 0 || trace.size() <= window) {
    throw InvalidArgument(
      fmt::format("classify_case: trace of length {} is too short for window {}", trace.size(), window));
  }
  bool saw_c1 = false;
  bool saw_c2 = false;
  for (std::size_t k = trace.size() - window; k < trace.size(); ++k) {
    (trace.condition_at(k) == ConditionFlag::C1 ? saw_c1 : saw_c2) = true;
  }
  CaseClassification out;
  out.label = !saw_c2 ? CaseLabel::S1Like : (!saw_c1 ? CaseLabel::S2Like : CaseLabel::S3Like);
  out.caveat = fmt::format("heuristic label from the last {} of {} iterations; a finite trace cannot establish "
                           "which condition occurs infinitely often",
                           window, trace.condition_count());
  return out;
}

std::vector<double> GeometricBound::values(ConditionTrace const &trace) const
{
  std::vector<double> y(trace.deltas.begin(), trace.deltas.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t k = n + 1; k <= trace.size(); ++k) {
    y.push_back(anchor * std::pow(beta, static_cast<double>(k - 1 - n)));
  }
  return y;
}

PgsSpec GeometricBound::as_pgs(ConditionTrace const &trace) const
{
  PgsSpec spec;
  spec.beta = beta;
  spec.peak0 = anchor;
  spec.chunk_starts = {n};
  spec.head.assign(trace.deltas.begin(), trace.deltas.begin() + static_cast<std::ptrdiff_t>(n));
  return spec;
}

GeometricBound construct_s12_bound(ConditionTrace const &trace, std::optional<double> c, std::size_t window)
{
  std::size_t const n = trace.size();
  if (n < 2) {
    throw BoundConstructionError("insufficient iterations for bound construction");
  }
  auto const label = classify_case(trace, std::min(window, trace.condition_count())).label;
  if (label == CaseLabel::S3Like) {
    throw BoundConstructionError("trace tail mixes C1 and C2; use the PGS bound (s3 mode)");
  }
  auto const need_c = [&]() {
    if (!c || !(*c > 0.0)) {
      throw InvalidArgument("construct_s12_bound: a positive growth constant c is required");
    }
    return *c;
  };

  GeometricBound g;
  g.label = label;
  if (label == CaseLabel::S1Like) {
    // C1 at every k >= p, so rho_k = gamma^(k-p) rho_p and
    // delta_{k+1} <= c / sqrt(rho_k) = (c / sqrt(rho_p)) alpha^(k-p).
    std::size_t p = 1;
    for (std::size_t k = 1; k < n; ++k) {
      if (trace.condition_at(k) == ConditionFlag::C2) {
        p = k + 1;
      }
    }
    g.beta = 1.0 / std::sqrt(trace.gamma);
    g.n = p;
    g.anchor = need_c() / std::sqrt(trace.rho(p));
  } else {
    // C2 at every k >= q: delta_{k+1} < eta^(k+1-q) delta_q, and delta_q is
    // bounded through the C1 iteration q-1 when there is one.
    std::size_t q = 1;
    for (std::size_t k = 1; k < n; ++k) {
      if (trace.condition_at(k) == ConditionFlag::C1) {
        q = k + 1;
      }
    }
    g.beta = trace.eta;
    g.n = q;
    double const delta_q_bound = q >= 2 ? need_c() / std::sqrt(trace.rho(q - 1)) : trace.delta(1);
    g.anchor = trace.eta * delta_q_bound;
  }
  g.A = g.anchor * std::pow(g.beta, -static_cast<double>(g.n));
  return g;
}

BoundCheck verify_bound(std::span<const double> deltas, std::span<const double> bound, std::size_t start)
{
  if (deltas.size() != bound.size()) {
    throw DimensionError(fmt::format("verify_bound: {} deltas vs {} bound terms", deltas.size(), bound.size()));
  }
  if (start == 0) {
    throw InvalidArgument("verify_bound: start index is 1-based");
  }
  BoundCheck check;
  for (std::size_t k = start; k <= deltas.size(); ++k) {
    double const d = deltas[k - 1];
    double const y = bound[k - 1];
    if (d > y * (1.0 + kBoundTolerance)) {
      check.holds = false;
    }
    double margin = 0.0;
    if (y > 0.0) {
      margin = d / y;
    } else if (d > 0.0) {
      margin = std::numeric_limits<double>::infinity();
    }
    if (check.worst_index == 0 || margin > check.worst_margin) {
      check.worst_margin = margin;
      check.worst_index = k;
    }
  }
  return check;
}

} // namespace pnp
