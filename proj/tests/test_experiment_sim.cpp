#include "bell/experiment_sim.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bell/errors.hpp"
#include "bell/exact_engine.hpp"
#include "bell/strategy_search.hpp"

using namespace bell;

TEST(simulate_trials, constant_model) {
  const auto ledger = simulate_trials(fixtures::m0(), 10, SettingBias{}, 42);
  ASSERT_EQ(ledger.records.size(), 10U);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(ledger.records[i].trial, i);
    EXPECT_EQ(ledger.records[i].a, 1);
    EXPECT_EQ(ledger.records[i].b, 1);
  }
  EXPECT_TRUE(ledger.counts_consistent());
}

TEST(simulate_trials, perfectly_correlated_context_is_exact) {
  const auto ledger = simulate_trials(fixtures::m2(), 100'000, SettingBias{}, 1);
  const auto chsh = empirical_chsh(ledger);
  EXPECT_EQ(chsh.correlations[0], 1.0);
  EXPECT_EQ(chsh.correlations[1], -1.0);
}

TEST(simulate_trials, local_randomness_context_within_binomial_bound) {
  const auto ledger = simulate_trials(fixtures::m3(), 1'000'000, SettingBias{}, 1);
  const auto chsh = empirical_chsh(ledger);
  EXPECT_NEAR(chsh.correlations[0], 0.5, 3.0 / std::sqrt(static_cast<double>(chsh.trials[0])));
  const double exact = chsh_from_correlations(correlation_set(fixtures::m3())).s_max.to_double();
  EXPECT_NEAR(chsh.s_max, exact, 3.0 * chsh.s_max_standard_error);
}

TEST(simulate_trials, reproducible_and_thread_independent) {
  const auto a = simulate_trials(fixtures::m3(), 200'000, SettingBias{}, 9, Exec::parallel);
  const auto b = simulate_trials(fixtures::m3(), 200'000, SettingBias{}, 9, Exec::serial);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(ledger_csv(a), ledger_csv(b));
  const auto c = simulate_trials(fixtures::m3(), 200'000, SettingBias{}, 10);
  EXPECT_NE(ledger_csv(a), ledger_csv(c));
}

TEST(simulate_trials, setting_bias_is_honoured) {
  SettingBias bias;
  bias.p = {0.9, 0.1, 0.25, 0.75};
  const auto ledger = simulate_trials(fixtures::m2(), 200'000, bias, 3);
  double alice0 = 0, bob0 = 0;
  for (const auto& r : ledger.records) {
    alice0 += r.alice_setting == 0;
    bob0 += r.bob_setting == 0;
  }
  EXPECT_NEAR(alice0 / 200'000, 0.9, 0.005);
  EXPECT_NEAR(bob0 / 200'000, 0.25, 0.005);
}

TEST(simulate_trials, rejects_bad_bias_and_empty_runs) {
  SettingBias bias;
  bias.p = {0.5, 0.6, 0.5, 0.5};
  EXPECT_THROW(simulate_trials(fixtures::m0(), 10, bias, 1), InvalidArgument);
  bias.p = {1.0, 0.0, 0.5, 0.5};
  EXPECT_THROW(simulate_trials(fixtures::m0(), 10, bias, 1), InvalidArgument);
  EXPECT_THROW(simulate_trials(fixtures::m0(), 0, SettingBias{}, 1), InvalidArgument);
}

TEST(simulate_trials, empirical_marginals_follow_local_pmfs) {
  // A_x reads only its local variable through the table; the fraction of
  // A_x = +1 given l1 = 0 must track p_x = (3/4, 1/4).
  const auto ledger = simulate_trials(fixtures::m3(), 400'000, SettingBias{}, 5);
  const auto& k = ledger.counts[0];
  const double n = static_cast<double>(k[0] + k[1] + k[2] + k[3]);
  // P(a = +1 | x) = 1/2 (3/4) + 1/2 (1/4) = 1/2.
  EXPECT_NEAR(static_cast<double>(k[0] + k[1]) / n, 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(empirical_chsh, constant_model) {
  const auto ledger = simulate_trials(fixtures::m0(), 1000, SettingBias{}, 1);
  const auto c = empirical_chsh(ledger);
  for (double e : c.correlations) EXPECT_EQ(e, 1.0);
  EXPECT_EQ(c.s_max, 2.0);
  EXPECT_EQ(c.s_max_standard_error, 0.0);
}

TEST(empirical_chsh, missing_context_is_an_error) {
  const auto ledger = quantum_reference({0, 0, 0, 0}, 1, 1);
  ASSERT_EQ(ledger.records.size(), 1U);
  EXPECT_THROW(empirical_chsh(ledger), InvalidArgument);
  EXPECT_THROW(no_signalling_report(ledger), InvalidArgument);
}

TEST(quantum_reference, optimal_angles_violate) {
  const double pi = std::numbers::pi;
  const auto ledger = quantum_reference({0, pi / 2, pi / 4, 3 * pi / 4}, 1'000'000, 1);
  const auto c = empirical_chsh(ledger);
  EXPECT_NEAR(c.s_max, 2.0 * std::numbers::sqrt2, 3.0 * c.s_max_standard_error);
  EXPECT_GT((c.s_max - 2.0) / c.s_max_standard_error, 5.0);
}

TEST(quantum_reference, equal_angles_are_anticorrelated) {
  const auto c = empirical_chsh(quantum_reference({0, 0, 0, 0}, 10'000, 2));
  for (double e : c.correlations) EXPECT_EQ(e, -1.0);
  EXPECT_EQ(c.s_max, 2.0);
}

TEST(no_signalling_report, constant_model_has_no_differences) {
  const auto r = no_signalling_report(simulate_trials(fixtures::m0(), 1000, SettingBias{}, 4));
  EXPECT_EQ(r.entries.size(), 8U);
  for (const auto& e : r.entries) EXPECT_EQ(e.difference, 0.0);
  EXPECT_EQ(r.max_abs_z, 0.0);
}

TEST(no_signalling_report, local_model_passes_across_seeds) {
  int exceed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = no_signalling_report(simulate_trials(fixtures::m3(), 1'000'000, SettingBias{}, seed));
    exceed += r.max_abs_z >= 4.0;
  }
  EXPECT_LE(exceed, 1);
}

TEST(no_signalling_report, flags_a_signalling_ledger) {
  TrialLedger ledger;
  std::uint64_t t = 0;
  auto add = [&](int as, int bs, int a, int b, int count) {
    for (int i = 0; i < count; ++i) {
      ledger.records.push_back({t++, static_cast<std::uint8_t>(as), static_cast<std::uint8_t>(bs),
                                static_cast<std::int8_t>(a), static_cast<std::int8_t>(b)});
    }
  };
  add(0, 0, 1, 1, 900);   // f(a=+1 | x, y) = 0.9
  add(0, 0, -1, 1, 100);
  add(0, 1, 1, 1, 100);   // f(a=+1 | x, y') = 0.1
  add(0, 1, -1, 1, 900);
  for (int bs = 0; bs < 2; ++bs) {
    add(1, bs, 1, 1, 500);
    add(1, bs, -1, -1, 500);
  }
  ledger.tally();
  const auto r = no_signalling_report(ledger);
  EXPECT_GT(r.max_abs_z, 20.0);
  const auto& first = r.entries[0];
  EXPECT_EQ(first.side, Side::alice);
  EXPECT_DOUBLE_EQ(first.frequencies[0], 0.9);
  EXPECT_DOUBLE_EQ(first.frequencies[1], 0.1);
}

TEST(exact_no_signalling, holds_for_fixtures_and_random_models) {
  EXPECT_TRUE(exact_no_signalling(fixtures::m3()).holds);
  const auto d = exact_outcome_distribution(fixtures::m3(), ContextIndex{0, 0});
  EXPECT_EQ(d[0], Rational(3, 8));  // (+,+): l1 = 0 and l_x = 0
  EXPECT_EQ(d[3], Rational(3, 8));
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto m = random_model(random_dimensions(rng, 4), rng);
    const auto r = exact_no_signalling(m);
    ASSERT_TRUE(r.holds);
    ASSERT_EQ(r.checks.size(), 4U);
    // Joint law is a distribution and reproduces the correlation.
    for (const auto& ctx : kContexts) {
      const auto p = exact_outcome_distribution(m, ctx);
      EXPECT_EQ(p[0] + p[1] + p[2] + p[3], Rational(1));
      EXPECT_EQ(p[0] + p[3] - p[1] - p[2], expectation_in_context(m, ctx));
    }
  }
}

TEST(ledger_csv, format_and_round_trip) {
  const auto ledger = simulate_trials(fixtures::m2(), 1000, SettingBias{}, 8);
  const auto text = ledger_csv(ledger);
  EXPECT_EQ(text.substr(0, text.find('\n')), "trial,alice_setting,bob_setting,a,b");
  const auto back = parse_ledger_csv(text);
  EXPECT_EQ(back.records, ledger.records);
  EXPECT_EQ(back.counts, ledger.counts);
  EXPECT_EQ(ledger_csv(back), text);
}

TEST(ledger_csv, constant_model_rows) {
  const auto text = ledger_csv(simulate_trials(fixtures::m0(), 3, SettingBias{}, 42));
  std::size_t rows = 0;
  for (std::size_t pos = text.find('\n') + 1; pos < text.size(); pos = text.find('\n', pos) + 1) {
    const auto line = text.substr(pos, text.find('\n', pos) - pos);
    EXPECT_EQ(line.substr(line.size() - 5), "+1,+1");
    ++rows;
  }
  EXPECT_EQ(rows, 3U);
}

TEST(ledger_csv, rejects_malformed_input) {
  EXPECT_THROW(parse_ledger_csv("wrong,header\n"), ParseError);
  EXPECT_THROW(parse_ledger_csv("trial,alice_setting,bob_setting,a,b\n0,x,y,+1\n"), ParseError);
  EXPECT_THROW(parse_ledger_csv("trial,alice_setting,bob_setting,a,b\n0,x,y,+1,0\n"), ParseError);
  EXPECT_THROW(parse_ledger_csv("trial,alice_setting,bob_setting,a,b\nq,x,y,+1,+1\n"), ParseError);
}

TEST(summary_json, includes_exact_values_for_models) {
  const auto m = fixtures::m3();
  const auto doc = summary_json(simulate_trials(m, 10'000, SettingBias{}, 1), &m);
  EXPECT_EQ(doc["exact"]["s_max"]["value"], "1");
  EXPECT_EQ(doc["contexts"].size(), 4U);
  EXPECT_EQ(doc["no_signalling"]["entries"].size(), 8U);
  EXPECT_EQ(doc["seed"], 1);
}

TEST(histogram_csv, counts_per_context) {
  const auto text = histogram_csv(simulate_trials(fixtures::m0(), 100, SettingBias{}, 1));
  EXPECT_EQ(text.substr(0, text.find('\n')), "alice_setting,bob_setting,a,b,count");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);
}
