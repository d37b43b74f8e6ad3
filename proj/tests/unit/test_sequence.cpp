#include "doctest.h"
#include "fixtures.hpp"

#include "pnp/sequence.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace pnp;

namespace {

PgsSpec spec_of(double beta, double peak, std::vector<std::size_t> starts, std::vector<double> head = {})
{
  PgsSpec s;
  s.beta = beta;
  s.peak0 = peak;
  s.chunk_starts = std::move(starts);
  s.head = std::move(head);
  return s;
}

/// Flags C1, C2, C1, C2, ... from k = 1 for any gamma, eta.
std::vector<double> alternating_deltas(double eta, std::size_t n)
{
  std::vector<double> d{1.0};
  while (d.size() < n) {
    bool const grow = d.size() % 2 == 1;
    d.push_back(grow ? d.back() : 0.5 * eta * d.back());
  }
  return d;
}

std::vector<ConditionFlag> flags_of(ConditionTrace const &t)
{
  std::vector<ConditionFlag> out;
  for (std::size_t k = 1; k <= t.condition_count(); ++k) {
    out.push_back(t.condition_at(k));
  }
  return out;
}

} // namespace

TEST_CASE("pgs_generate examples")
{
  auto const y = pgs_generate(spec_of(0.5, 1.0, {1, 3, 6}), 7);
  CHECK(y == std::vector<double>{1, 1, 0.5, 0.5, 0.25, 0.125, 0.25});

  auto const one = pgs_generate(spec_of(0.3, 2.0, {1}), 12);
  auto const unit = pgs_generate(spec_of(0.3, 2.0, {1, 2, 3, 4}), 12);
  for (std::size_t k = 2; k <= 12; ++k) {
    double const g = 2.0 * std::pow(0.3, static_cast<double>(k - 2));
    CHECK(one[k - 1] == doctest::Approx(g).epsilon(1e-14));
    CHECK(unit[k - 1] == doctest::Approx(g).epsilon(1e-14));
  }

  auto const headed = pgs_generate(spec_of(0.5, 1.0, {2, 4}, {7.0, 3.0}), 6);
  CHECK(headed == std::vector<double>{7, 3, 1, 0.5, 0.5, 0.25});

  auto const no_head = pgs_generate(spec_of(0.5, 4.0, {0, 2}), 4);
  CHECK(no_head == std::vector<double>{4, 2, 2, 1});
}

TEST_CASE("PgsSpec validation")
{
  CHECK_THROWS_AS(spec_of(1.0, 1.0, {1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(spec_of(0.5, 0.0, {1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(spec_of(0.5, 1.0, {3, 3}).validate(), InvalidArgument);
  CHECK_THROWS_AS(spec_of(0.5, 1.0, {2}, {1.0}).validate(), InvalidArgument);
  CHECK(spec_of(0.5, 1.0, {2, 5}).chunk_start(4) == 7);
  CHECK(spec_of(0.5, 1.5, {2, 5}).head_sum() == 3.0);
}

TEST_CASE("chunk sum bound examples")
{
  auto const s = spec_of(0.5, 1.0, {1, 4, 6});
  CHECK(pgs_chunk_sum_bound(s, 1) == 2.0);
  CHECK(pgs_chunk_sum_bound(s, 3) == 0.5);
  auto const y = pgs_generate(s, 6);
  CHECK(y[1] + y[2] + y[3] == doctest::Approx(2.0 * (1.0 - 0.125)));
}

TEST_CASE("chunk sums stay strictly below their bound")
{
  Rng rng = substream(31, 0);
  for (int trial = 0; trial < 100; ++trial) {
    auto const spec = fixture::random_pgs_spec(rng, 300);
    auto const y = pgs_generate(spec, spec.chunk_starts.back());
    for (std::size_t j = 1; j < spec.chunk_starts.size(); ++j) {
      double sum = 0.0;
      for (std::size_t k = spec.chunk_start(j) + 1; k <= spec.chunk_start(j + 1); ++k) {
        sum += y[k - 1];
      }
      CHECK(sum < pgs_chunk_sum_bound(spec, j));
    }
  }
}

TEST_CASE("partial sums are monotone and bounded")
{
  Rng rng = substream(32, 0);
  for (int trial = 0; trial < 100; ++trial) {
    auto const spec = fixture::random_pgs_spec(rng, 2000);
    auto const y = pgs_generate(spec, 2000);
    double const bound = pgs_partial_sum_bound(spec);
    double sum = 0.0;
    for (double v : y) {
      double const next = sum + v;
      CHECK(next >= sum);
      sum = next;
    }
    CHECK(sum <= bound);
  }
}

TEST_CASE("a PGS can sit far above the geometric sequence with the same rate")
{
  // Chunks of length 5: the third peak y_12 = beta^2 while beta^(12-2) is tiny.
  auto const s = spec_of(0.5, 1.0, {1, 6, 11, 16});
  auto const y = pgs_generate(s, 16);
  CHECK(y[11] == 0.25);
  CHECK(y[11] > std::pow(0.5, 10.0));
}

TEST_CASE("cauchy_index examples")
{
  std::vector<std::size_t> const starts{1, 3, 6, 10};
  auto const c = cauchy_index(1.0, 0.5, 1.0, starts);
  CHECK(c.k_index == 4);
  CHECK(c.n_start == 11);
  CHECK(c.tail_bound == 0.5);
  CHECK(c.tail_bound < c.epsilon);

  auto const small = cauchy_index(1.0, 0.01, 1.0, starts);
  CHECK(small.k_index == 2);
  CHECK(small.n_start == 4);
}

TEST_CASE("cauchy_index is minimal and its tail stays below epsilon")
{
  Rng rng = substream(33, 0);
  for (int trial = 0; trial < 100; ++trial) {
    auto const spec = fixture::random_pgs_spec(rng, 200);
    for (double eps : {1e-1, 1e-3}) {
      auto const cert = cauchy_index(spec, eps);
      double const q = 1.0 - spec.beta;
      double const thr = eps * q * q / spec.peak0;
      CHECK(std::pow(spec.beta, double(cert.k_index - 1)) < thr);
      if (cert.k_index > 1) {
        CHECK_FALSE(std::pow(spec.beta, double(cert.k_index - 2)) < thr);
      }
      CHECK(cert.n_start == spec.chunk_start(cert.k_index) + 1);
      CHECK(cert.tail_bound < eps);
      auto const y = pgs_generate(spec, 10 * cert.n_start);
      double tail = 0.0;
      for (std::size_t k = cert.n_start; k <= y.size(); ++k) {
        tail += y[k - 1];
        REQUIRE(tail < eps);
      }
    }
  }
}

TEST_CASE("C1 step constant examples")
{
  // One C1 iteration (k = 1): delta_2 = 0.1, rho_1 = 4.
  auto const t = fixture::trace_from_deltas({1.0, 0.1}, 2.0, 0.05, 4.0);
  REQUIRE(t.condition_at(1) == ConditionFlag::C1);
  CHECK(estimate_lemma1_constant(t) == doctest::Approx(0.2).epsilon(1e-15));

  auto const all_c2 = fixture::trace_from_deltas({1.0, 0.1, 0.01, 0.001}, 2.0, 0.5);
  CHECK_THROWS_AS(estimate_lemma1_constant(all_c2), BoundConstructionError);

  Rng rng = substream(34, 0);
  std::uniform_real_distribution<double> ratio(0.2, 1.3);
  std::vector<double> d{1.0};
  for (int i = 0; i < 80; ++i) {
    d.push_back(d.back() * ratio(rng));
  }
  auto const multi = fixture::trace_from_deltas(d, 1.1, 0.7, 2.0);
  double brute = 0.0;
  for (std::size_t k = 1; k < multi.size(); ++k) {
    if (multi.condition_at(k) == ConditionFlag::C1) {
      brute = std::max(brute, multi.delta(k + 1) * std::sqrt(multi.rho(k)));
    }
  }
  CHECK(estimate_lemma1_constant(multi) == brute);
}

TEST_CASE("ConditionTrace validation names the broken invariant")
{
  auto t = fixture::trace_from_deltas({1.0, 0.9, 0.1, 0.09}, 1.5, 0.5);
  CHECK_NOTHROW(t.validate());

  auto bad_flag = t;
  bad_flag.flags[2] = ConditionFlag::C1;
  CHECK_THROWS_WITH_AS(bad_flag.validate(), doctest::Contains("condition flag inconsistent"), TraceInvariantError);

  auto bad_rho = t;
  bad_rho.rhos[3] *= 1.01;
  CHECK_THROWS_WITH_AS(bad_rho.validate(), doctest::Contains("rho"), TraceInvariantError);

  auto first = t;
  first.flags[0] = ConditionFlag::C1;
  CHECK_THROWS_AS(first.validate(), TraceInvariantError);
}

TEST_CASE("S3 bound on an alternating trace")
{
  auto const t = fixture::trace_from_deltas(alternating_deltas(0.3, 9), 4.0, 0.3);
  CHECK(flags_of(t) == std::vector<ConditionFlag>{ConditionFlag::C1, ConditionFlag::C2, ConditionFlag::C1,
                                                  ConditionFlag::C2, ConditionFlag::C1, ConditionFlag::C2,
                                                  ConditionFlag::C1, ConditionFlag::C2});
  double const c = estimate_lemma1_constant(t);
  auto const b = construct_s3_bound(t, c);
  CHECK(b.spec.beta == 0.5);
  CHECK(b.n1 == 1);
  CHECK(b.c1_onsets == std::vector<std::size_t>{1, 3, 5, 7});
  CHECK(b.c2_onsets == std::vector<std::size_t>{2, 4, 6, 8});
  CHECK(b.spec.head == std::vector<double>{1.0});
  CHECK(b.spec.peak0 == doctest::Approx(c / std::sqrt(t.rho(1))));

  // Peaks follow the proof's recursion L_{j+1} <= L_j / sqrt(gamma).
  for (std::size_t j = 0; j + 1 < b.c1_onsets.size(); ++j) {
    double const lj = c / std::sqrt(t.rho(b.c1_onsets[j]));
    double const lj1 = c / std::sqrt(t.rho(b.c1_onsets[j + 1]));
    CHECK(lj1 <= lj / std::sqrt(t.gamma) * (1.0 + 1e-15));
  }
  auto const check = verify_bound(t.deltas, b.values(), b.n1 + 1);
  CHECK(check.holds);
}

TEST_CASE("S3 bound needs two switches")
{
  auto const t = fixture::trace_from_deltas({1.0, 0.9, 0.1, 0.09, 0.08}, 1.5, 0.5);
  CHECK_THROWS_WITH_AS(construct_s3_bound(t, 1.0), doctest::Contains("use geometric bound"), BoundConstructionError);
  auto const one = fixture::trace_from_deltas({1.0}, 1.5, 0.5);
  CHECK_THROWS_AS(construct_s3_bound(one, 1.0), BoundConstructionError);
}

TEST_CASE("S3 bound round trip touches the PGS at every peak")
{
  // gamma = 4, eta = 0.3: peaks 2^-(j-1) at k = 2j land exactly on the PGS,
  // the C2 values in between sit at 0.2 of the preceding peak.
  std::vector<double> d{1.0};
  double peak = 1.0;
  for (int j = 1; j <= 12; ++j) {
    d.push_back(peak);
    d.push_back(0.2 * peak);
    peak *= 0.5;
  }
  auto const t = fixture::trace_from_deltas(d, 4.0, 0.3);
  CHECK_NOTHROW(t.validate());
  double const c = estimate_lemma1_constant(t);
  CHECK(c == 1.0);
  auto const b = construct_s3_bound(t, c);
  auto const y = b.values();
  for (std::size_t k = 2; k <= t.size(); k += 2) {
    CHECK(y[k - 1] == t.delta(k));
  }
  auto const check = verify_bound(t.deltas, y, b.n1 + 1);
  CHECK(check.holds);
  CHECK(check.worst_margin == 1.0);
}

TEST_CASE("S3 bound holds on random switching traces")
{
  Rng rng = substream(35, 0);
  std::uniform_real_distribution<double> ratio(0.05, 1.5);
  std::uniform_real_distribution<double> gamma(1.01, 3.0);
  std::uniform_real_distribution<double> eta(0.05, 0.95);
  int built = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> d{1.0};
    for (int i = 0; i < 60; ++i) {
      d.push_back(d.back() * ratio(rng));
    }
    auto const t = fixture::trace_from_deltas(d, gamma(rng), eta(rng), 0.5);
    double const c = estimate_lemma1_constant(t);
    PgsBound b;
    try {
      b = construct_s3_bound(t, c);
    } catch (BoundConstructionError const &) {
      continue;
    }
    ++built;
    CHECK(b.spec.beta == std::max(1.0 / std::sqrt(t.gamma), t.eta));
    CHECK(verify_bound(t.deltas, b.values(), b.n1 + 1).holds);
  }
  CHECK(built > 200);
}

TEST_CASE("beta selection")
{
  for (double g : {1.05, 1.2, 2.0, 4.0, 9.0}) {
    for (double e : {0.1, 0.5, 0.6, 0.9, 0.95}) {
      auto const t = fixture::trace_from_deltas(alternating_deltas(e, 8), g, e);
      CHECK(construct_s3_bound(t, estimate_lemma1_constant(t)).spec.beta == std::max(1.0 / std::sqrt(g), e));
    }
  }
}

TEST_CASE("S1 geometric bound")
{
  // All C1 with delta_{k+1} = 1 / sqrt(rho_k) and gamma = 4.
  std::vector<double> d{2.0};
  for (int k = 1; k < 12; ++k) {
    d.push_back(std::pow(0.5, k - 1));
  }
  auto const t = fixture::trace_from_deltas(d, 4.0, 0.3);
  REQUIRE(classify_case(t, 5).label == CaseLabel::S1Like);
  auto const g = construct_s12_bound(t, 1.0, 5);
  CHECK(g.label == CaseLabel::S1Like);
  CHECK(g.beta == 0.5);
  CHECK(g.n == 1);
  CHECK(g.anchor == 1.0);
  CHECK(g.A == 2.0);
  auto const y = g.values(t);
  for (std::size_t k = 2; k <= t.size(); ++k) {
    CHECK(y[k - 1] == doctest::Approx(std::pow(0.5, double(k - 2))));
  }
  auto const check = verify_bound(t.deltas, y, 1);
  CHECK(check.holds);
  CHECK(check.worst_margin == doctest::Approx(1.0));
  CHECK_THROWS_AS(construct_s12_bound(t, std::nullopt, 5), InvalidArgument);
}

TEST_CASE("S2 geometric bound")
{
  std::vector<double> d{1.0, 1.0};
  for (int k = 0; k < 10; ++k) {
    d.push_back(0.4 * d.back());
  }
  auto const t = fixture::trace_from_deltas(d, 1.5, 0.5);
  for (std::size_t k = 2; k <= t.condition_count(); ++k) {
    CHECK(t.condition_at(k) == ConditionFlag::C2);
    CHECK(t.delta(k + 1) < 0.5 * t.delta(k));
  }
  double const c = estimate_lemma1_constant(t);
  auto const g = construct_s12_bound(t, c, 5);
  CHECK(g.label == CaseLabel::S2Like);
  CHECK(g.beta == 0.5);
  CHECK(g.n == 2);
  CHECK(g.anchor == doctest::Approx(0.5 * c / std::sqrt(t.rho(1))));
  CHECK(verify_bound(t.deltas, g.values(t), g.n).holds);

  auto const pgs = pgs_generate(g.as_pgs(t), t.size());
  auto const direct = g.values(t);
  for (std::size_t i = 0; i < pgs.size(); ++i) {
    CHECK(pgs[i] == doctest::Approx(direct[i]).epsilon(1e-14));
  }
}

TEST_CASE("S2 bound without any C1 anchors on the first delta")
{
  auto const t = fixture::trace_from_deltas({1.0, 0.3, 0.1, 0.02, 0.005}, 1.5, 0.5);
  auto const g = construct_s12_bound(t, std::nullopt, 3);
  CHECK(g.n == 1);
  CHECK(g.anchor == 0.5);
  CHECK(verify_bound(t.deltas, g.values(t), 1).holds);
}

TEST_CASE("geometric bound holds on random single-condition tails")
{
  Rng rng = substream(36, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double const gamma = 1.05 + 2.0 * u(rng);
    double const eta = 0.1 + 0.8 * u(rng);
    bool const s1 = trial % 2 == 0;
    std::vector<double> d{1.0};
    for (int i = 0; i < 15; ++i) {
      d.push_back(d.back() * (0.2 + 1.2 * u(rng)));
    }
    for (int i = 0; i < 30; ++i) {
      // C1 tail: ratio in [eta, 1]; C2 tail: ratio below eta.
      d.push_back(d.back() * (s1 ? eta + (1.0 - eta) * u(rng) : eta * (0.1 + 0.8 * u(rng))));
    }
    auto const t = fixture::trace_from_deltas(d, gamma, eta);
    std::optional<double> c;
    try {
      c = estimate_lemma1_constant(t);
    } catch (BoundConstructionError const &) {
    }
    auto const g = construct_s12_bound(t, c, 20);
    CHECK(g.label == (s1 ? CaseLabel::S1Like : CaseLabel::S2Like));
    CHECK(verify_bound(t.deltas, g.values(t), g.n).holds);
  }
}

TEST_CASE("S1/S2 construction refuses a mixed tail")
{
  auto const t = fixture::trace_from_deltas(alternating_deltas(0.5, 20), 1.5, 0.5);
  CHECK_THROWS_WITH_AS(construct_s12_bound(t, 1.0, 10), doctest::Contains("s3"), BoundConstructionError);
}

TEST_CASE("classify_case")
{
  auto const mixed = fixture::trace_from_deltas(alternating_deltas(0.5, 30), 1.5, 0.5);
  auto const cls = classify_case(mixed, 10);
  CHECK(cls.label == CaseLabel::S3Like);
  CHECK(cls.caveat.find("heuristic") != std::string::npos);

  std::vector<double> tail_c1{1.0, 0.1, 0.01};
  for (int i = 0; i < 10; ++i) {
    tail_c1.push_back(tail_c1.back() * 0.9);
  }
  auto const s1 = fixture::trace_from_deltas(tail_c1, 1.5, 0.5);
  CHECK(classify_case(s1, 10).label == CaseLabel::S1Like);
  CHECK(classify_case(s1, 12).label == CaseLabel::S3Like);

  std::vector<double> tail_c2{1.0, 1.0};
  for (int i = 0; i < 10; ++i) {
    tail_c2.push_back(tail_c2.back() * 0.1);
  }
  auto const s2 = fixture::trace_from_deltas(tail_c2, 1.5, 0.5);
  CHECK(classify_case(s2, 10).label == CaseLabel::S2Like);
  CHECK_THROWS_AS(classify_case(s2, 12), InvalidArgument);
  CHECK(to_string(CaseLabel::S3Like) == "S3-like");
}

TEST_CASE("verify_bound")
{
  std::vector<double> const y{3.0, 2.0, 1.0};
  auto const same = verify_bound(y, y, 1);
  CHECK(same.holds);
  CHECK(same.worst_margin == 1.0);

  std::vector<double> const d{3.0, 2.5, 0.5};
  auto const bad = verify_bound(d, y, 1);
  CHECK_FALSE(bad.holds);
  CHECK(bad.worst_margin == 1.25);
  CHECK(bad.worst_index == 2);
  CHECK(verify_bound(d, y, 3).holds);

  std::vector<double> const tiny{3.0, 2.0 * (1.0 + 1e-13), 1.0};
  CHECK(verify_bound(tiny, y, 1).holds);
  CHECK_THROWS_AS(verify_bound(d, std::vector<double>{1.0}, 1), DimensionError);
}
