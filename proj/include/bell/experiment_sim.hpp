#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bell/chsh.hpp"
#include "bell/model.hpp"
#include "bell/parallel.hpp"

namespace bell {

/// Setting probabilities (p_x, p_x', p_y, p_y'); each side must sum to 1.
struct SettingBias {
  std::array<double, 4> p{0.5, 0.5, 0.5, 0.5};
};

void check_bias(const SettingBias& bias);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint8_t alice_setting = 0;
  std::uint8_t bob_setting = 0;
  std::int8_t a = 1;
  std::int8_t b = 1;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Outcome bin order within a context: (+,+) (+,-) (-,+) (-,-).
inline constexpr std::size_t outcome_bin(int a, int b) { return (a > 0 ? 0U : 2U) + (b > 0 ? 0U : 1U); }

struct TrialLedger {
  std::vector<TrialRecord> records;
  std::optional<std::uint64_t> seed;
  std::array<std::string, 2> alice_labels{"x", "x'"};
  std::array<std::string, 2> bob_labels{"y", "y'"};
  /// counts[2*alice_setting + bob_setting][outcome_bin(a, b)]
  std::array<std::array<std::uint64_t, 4>, 4> counts{};

  std::uint64_t context_total(ContextIndex ctx) const;
  /// Recomputes counts from records.
  void tally();
  bool counts_consistent() const;
};

/// Trials are generated in shards of this many; shard s draws from
/// Rng(derive_seed(seed, s)), so the ledger does not depend on thread count.
inline constexpr std::uint64_t kShardSize = std::uint64_t{1} << 16;

/// Per trial: settings (independent per side, from `bias`), then (l1, l2)
/// from the source pmf, then U1 and U2; outcomes through the reduced model's
/// deterministic maps and the response tables.
TrialLedger simulate_trials(const ContextualModel& model, std::uint64_t n, const SettingBias& bias, std::uint64_t seed,
                            Exec exec = Exec::parallel);

/// Singlet statistics P(a,b | alpha, beta) = (1 - a b cos(alpha - beta)) / 4 with
/// uniform settings. angles = (alpha_x, alpha_x', beta_y, beta_y').
TrialLedger quantum_reference(const std::array<double, 4>& angles, std::uint64_t n, std::uint64_t seed,
                              Exec exec = Exec::parallel);

struct EmpiricalSum {
  std::array<int, 4> signs{};
  double value = 0;
  double standard_error = 0;
};

struct EmpiricalChsh {
  std::array<std::uint64_t, 4> trials{};
  std::array<double, 4> correlations{};
  std::array<double, 4> standard_errors{};  // sqrt((1 - e^2) / n_ctx)
  std::array<EmpiricalSum, 8> sums;
  double s_max = 0;
  double s_max_standard_error = 0;  // of the maximizing sum
};

/// Throws InvalidArgument when a context has no trials.
EmpiricalChsh empirical_chsh(const TrialLedger& ledger);

struct NoSignallingEntry {
  Side side = Side::alice;
  int setting = 0;   // local setting position
  int outcome = 1;   // +1 or -1
  std::array<std::uint64_t, 2> trials{};      // n under remote setting 0 and 1
  std::array<double, 2> frequencies{};        // f(outcome | setting, remote)
  double difference = 0;                      // f[0] - f[1]
  double standard_error = 0;                  // pooled two-proportion
  double z = 0;
};

struct NoSignallingReport {
  std::vector<NoSignallingEntry> entries;
  double max_abs_z = 0;
};

NoSignallingReport no_signalling_report(const TrialLedger& ledger);

/// Exact P(a, b | context), bins in outcome_bin order.
std::array<Rational, 4> exact_outcome_distribution(const ContextualModel& model, ContextIndex ctx);

struct ExactMarginalCheck {
  Side side = Side::alice;
  int setting = 0;
  std::array<Rational, 2> p_plus;  // P(outcome +1 | setting, remote setting 0 / 1)
};

struct ExactNoSignalling {
  std::vector<ExactMarginalCheck> checks;
  bool holds = false;
};

/// Marginalizes the exact joint outcome law over the remote outcome and
/// compares across the remote setting.
ExactNoSignalling exact_no_signalling(const ContextualModel& model);

/// Header `trial,alice_setting,bob_setting,a,b`; outcomes as +1 / -1.
std::string ledger_csv(const TrialLedger& ledger);
/// Throws ParseError. Setting positions follow ascending label order.
TrialLedger parse_ledger_csv(std::string_view text);

/// `alice_setting,bob_setting,a,b,count` rows for external plotting.
std::string histogram_csv(const TrialLedger& ledger);

/// Empirical correlations, CHSH sums, and the no-signalling table; when a
/// model is supplied, its exact correlations and s_max are included.
nlohmann::json summary_json(const TrialLedger& ledger, const ContextualModel* model = nullptr);

}  // namespace bell
