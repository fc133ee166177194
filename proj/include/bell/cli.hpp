#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "bell/experiment_sim.hpp"
#include "bell/strategy_search.hpp"

namespace bell::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verdict_failure = 1;  // also: model invariant violations
inline constexpr int input_error = 2;
inline constexpr int resource_guard = 3;
}  // namespace exit_code

enum class OutputFormat { json, csv, text };

OutputFormat parse_format(const std::string& text);

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string out_path;      // empty: stdout
  std::string summary_path;  // simulate/report: summary JSON; empty: stdout
  std::string histogram_path;
  std::string ledger_path;   // report: input ledger CSV
  std::string spec_path;     // search: JSON search spec
  std::uint64_t seed = 1;
  std::uint64_t budget = 10'000;
  std::uint64_t n = 100'000;
  SettingBias bias;
  std::optional<std::uint64_t> limit;
  SearchMode mode = SearchMode::exhaustive;
  Dimensions dims{1, 1, {1, 1}, {1, 1}};
  long max_denominator = kDefaultMaxDenominator;
  OutputFormat format = OutputFormat::json;
  std::optional<std::array<double, 4>> quantum;
};

/// Parses "a,b,c,..." into exactly `count` numbers; throws InvalidArgument.
std::array<double, 4> parse_quad(const std::string& text);
Dimensions parse_dims(const std::string& text);

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_unify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_search(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.command and maps exceptions to exit codes: ParseError,
/// I/O and argument errors to 2, SizeExceeded to 3, InvalidModel to 1.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace bell::cli
