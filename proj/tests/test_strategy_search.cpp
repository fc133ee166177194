#include "bell/strategy_search.hpp"

#include <gtest/gtest.h>

#include "bell/errors.hpp"
#include "bell/model_io.hpp"
#include "oracles.hpp"

using namespace bell;

namespace {

SearchSpec spec_of(Dimensions d, SearchMode mode, std::uint64_t seed = 1, std::uint64_t budget = 1) {
  SearchSpec s;
  s.dims = d;
  s.mode = mode;
  s.seed = seed;
  s.budget = budget;
  return s;
}

// Brute force over every table assignment via the oracle enumeration.
Rational oracle_exhaustive_max(const ContextualModel& tmpl) {
  std::vector<int*> entries;
  auto m = tmpl;
  for (auto* side : {&m.alice, &m.bob}) {
    for (auto& s : *side) {
      for (auto& row : s.table.values) {
        for (auto& v : row) entries.push_back(&v);
      }
    }
  }
  mpq_class best = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << entries.size()); ++bits) {
    for (std::size_t i = 0; i < entries.size(); ++i) *entries[i] = ((bits >> i) & 1U) ? -1 : 1;
    std::array<mpq_class, 4> e;
    for (std::size_t c = 0; c < 4; ++c) e[c] = oracle::expectation(m, kContexts[c].alice, kContexts[c].bob);
    best = std::max(best, oracle::chsh_max(e));
  }
  return Rational(best);
}

}  // namespace

TEST(enumerate_deterministic, singleton_spaces) {
  const auto r = enumerate_deterministic(spec_of({1, 1, {1, 1}, {1, 1}}, SearchMode::exhaustive));
  EXPECT_EQ(r.iterations, 16U);
  EXPECT_EQ(r.best_s_max, Rational(2));
  EXPECT_EQ(s_max_of(r.best_model), Rational(2));
}

TEST(enumerate_deterministic, two_point_sources) {
  const auto r = enumerate_deterministic(spec_of({2, 2, {1, 1}, {1, 1}}, SearchMode::exhaustive));
  EXPECT_EQ(r.iterations, 256U);
  EXPECT_EQ(r.best_s_max, Rational(2));
}

TEST(enumerate_deterministic, full_two_by_two) {
  const auto r = enumerate_deterministic(spec_of({2, 2, {2, 2}, {2, 2}}, SearchMode::exhaustive));
  EXPECT_EQ(r.iterations, 65536U);
  EXPECT_EQ(r.best_s_max, Rational(2));
}

TEST(enumerate_deterministic, limit_is_enforced) {
  auto s = spec_of({2, 2, {2, 2}, {2, 2}}, SearchMode::exhaustive);
  s.enumeration_limit = 65535;
  EXPECT_THROW(enumerate_deterministic(s), SizeExceeded);
  EXPECT_EQ(table_assignment_count(s.dims), 65536U);
}

TEST(enumerate_tables, agrees_with_oracle_on_correlated_sources) {
  // Correlated source and non-uniform pmfs: a stronger adversary than the
  // uniform template.
  auto t = fixtures::m3();
  t.bob[1].pmf = Pmf::point();
  t.bob[1].table.values = {{1}, {1}};
  const auto r = enumerate_tables(t, kDefaultEnumerationLimit);
  EXPECT_EQ(r.best_s_max, oracle_exhaustive_max(t));
  EXPECT_EQ(r.best_s_max, Rational(2));
}

TEST(enumerate_tables, kernel_matches_exact_engine_for_every_assignment) {
  Rng rng(9);
  const auto t = random_model(Dimensions{2, 1, {2, 1}, {1, 2}}, rng);
  const auto r = enumerate_tables(t, kDefaultEnumerationLimit, Exec::serial);
  EXPECT_EQ(r.best_s_max, oracle_exhaustive_max(t));
  EXPECT_LE(r.best_s_max, Rational(2));
}

TEST(enumerate_tables, serial_and_parallel_agree) {
  Rng rng(10);
  for (int i = 0; i < 5; ++i) {
    const auto t = random_model(Dimensions{2, 2, {2, 1}, {2, 2}}, rng);
    const auto a = enumerate_tables(t, kDefaultEnumerationLimit, Exec::serial);
    const auto b = enumerate_tables(t, kDefaultEnumerationLimit, Exec::parallel);
    EXPECT_EQ(a.best_s_max, b.best_s_max);
    EXPECT_EQ(serialize_model(a.best_model), serialize_model(b.best_model));
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) EXPECT_EQ(a.trace[k].iteration, b.trace[k].iteration);
  }
}

TEST(random_model, singleton_spec) {
  Rng rng(1);
  const auto m = random_model(Dimensions{1, 1, {1, 1}, {1, 1}}, rng);
  EXPECT_TRUE(validate_model(m).empty());
  EXPECT_EQ(m.source(0, 0), Rational(1));
}

TEST(random_model, always_valid_with_bounded_denominators) {
  Rng rng(123);
  for (int i = 0; i < 500; ++i) {
    const auto m = random_model(random_dimensions(rng, 5), rng, 64);
    ASSERT_TRUE(validate_model(m).empty());
    for (const auto& s : m.alice) {
      for (const auto& w : s.pmf.weights) EXPECT_LE(w.denominator(), 64);
    }
  }
}

TEST(random_model, deterministic_per_seed) {
  Rng a(77), b(77);
  const Dimensions d{3, 2, {2, 2}, {1, 3}};
  EXPECT_EQ(serialize_model(random_model(d, a)), serialize_model(random_model(d, b)));
}

TEST(random_search, never_exceeds_bound_and_is_deterministic) {
  const auto s = spec_of({2, 2, {2, 2}, {2, 2}}, SearchMode::random_sampling, 5, 2000);
  const auto a = random_search(s, Exec::parallel);
  const auto b = random_search(s, Exec::serial);
  EXPECT_LE(a.best_s_max, Rational(2));
  EXPECT_EQ(a.best_s_max, b.best_s_max);
  EXPECT_EQ(serialize_model(a.best_model), serialize_model(b.best_model));
  EXPECT_EQ(search_result_json(a).dump(), search_result_json(b).dump());
}

TEST(hill_climb, from_identity_model) {
  auto s = spec_of({1, 1, {1, 1}, {1, 1}}, SearchMode::hill_climb, 7, 200);
  const auto r = hill_climb(s, fixtures::m0());
  EXPECT_EQ(r.best_s_max, Rational(2));
}

TEST(hill_climb, budget_one_returns_start) {
  auto s = spec_of({2, 2, {1, 1}, {1, 1}}, SearchMode::hill_climb, 7, 1);
  const auto r = hill_climb(s, fixtures::m3());
  EXPECT_EQ(r.iterations, 1U);
  EXPECT_EQ(serialize_model(r.best_model), serialize_model(fixtures::m3()));
  EXPECT_EQ(r.best_s_max, Rational(1));
}

TEST(hill_climb, climbs_to_two_and_never_past_it) {
  auto s = spec_of({2, 2, {2, 2}, {2, 2}}, SearchMode::hill_climb, 7, 20'000);
  const auto r = hill_climb(s);
  EXPECT_EQ(r.best_s_max, Rational(2));
  EXPECT_EQ(r.iterations, 20'000U);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GT(r.trace[i].s_max, r.trace[i - 1].s_max);
  EXPECT_TRUE(validate_model(r.best_model).empty());
}

TEST(hill_climb, deterministic) {
  auto s = spec_of({2, 3, {2, 1}, {3, 2}}, SearchMode::hill_climb, 99, 3000);
  EXPECT_EQ(search_result_json(hill_climb(s)).dump(), search_result_json(hill_climb(s)).dump());
}

TEST(search_spec, rejects_degenerate_specs) {
  EXPECT_THROW(run_search(spec_of({0, 1, {1, 1}, {1, 1}}, SearchMode::exhaustive)), InvalidArgument);
  auto s = spec_of({1, 1, {1, 1}, {1, 1}}, SearchMode::random_sampling);
  s.budget = 0;
  EXPECT_THROW(run_search(s), InvalidArgument);
  EXPECT_THROW(parse_search_mode("annealing"), InvalidArgument);
}

TEST(search_result_json, has_certificate_and_metadata) {
  const auto r = enumerate_deterministic(spec_of({1, 1, {1, 1}, {1, 1}}, SearchMode::exhaustive));
  const auto doc = search_result_json(r);
  EXPECT_EQ(doc["verdict"], "satisfied");
  EXPECT_EQ(doc["search"]["best_s_max"]["value"], "2");
  EXPECT_EQ(doc["search"]["rng"], kRngAlgorithm);
  EXPECT_EQ(doc["search"]["iterations"], 16);
  EXPECT_EQ(doc["model_sha256"], model_hash(r.best_model));
}
