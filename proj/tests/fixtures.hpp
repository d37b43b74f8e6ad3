#pragma once

// Synthetic inputs shared by unit and acceptance tests.

#include "pnp/rng.hpp"
#include "pnp/sequence.hpp"
#include "pnp/solver.hpp"

#include <cstddef>
#include <random>
#include <vector>

namespace fixture {

/// A trace with the given deltas whose flags and penalties follow the update
/// rule exactly, starting from rho0 with the first update held.
inline pnp::ConditionTrace trace_from_deltas(std::vector<double> const &deltas, double gamma, double eta, double rho0 = 1.0)
{
  pnp::ConditionTrace t;
  t.gamma = gamma;
  t.eta = eta;
  double rho = rho0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (i == 0) {
      t.flags.push_back(std::nullopt);
    } else {
      auto const upd = pnp::update_rho(rho, deltas[i], deltas[i - 1], gamma, eta);
      rho = upd.rho_next;
      t.flags.push_back(upd.flag);
    }
    t.deltas.push_back(deltas[i]);
    t.rhos.push_back(rho);
  }
  return t;
}

/// beta in [0.1, 0.95], peak in [0.1, 10], chunk lengths 1..10 covering at
/// least `horizon` terms, and a random head of 0..5 terms.
inline pnp::PgsSpec random_pgs_spec(pnp::Rng &rng, std::size_t horizon)
{
  std::uniform_real_distribution<double> beta(0.1, 0.95);
  std::uniform_real_distribution<double> peak(0.1, 10.0);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  std::uniform_int_distribution<std::size_t> head_len(0, 5);
  pnp::PgsSpec spec;
  spec.beta = beta(rng);
  spec.peak0 = peak(rng);
  std::size_t n = head_len(rng);
  std::uniform_real_distribution<double> head(0.0, spec.peak0);
  for (std::size_t i = 0; i < n; ++i) {
    spec.head.push_back(head(rng));
  }
  while (n < horizon) {
    spec.chunk_starts.push_back(n);
    n += len(rng);
  }
  spec.chunk_starts.push_back(n);
  return spec;
}

} // namespace fixture
