#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bell/model.hpp"
#include "bell/parallel.hpp"
#include "bell/rng.hpp"

namespace bell {

enum class SearchMode { exhaustive, random_sampling, hill_climb };

const char* to_string(SearchMode mode);
/// Accepts "exhaustive", "random" and "hill-climb"; throws InvalidArgument.
SearchMode parse_search_mode(const std::string& text);

inline constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t{1} << 24;
inline constexpr long kDefaultMaxDenominator = 64;

struct SearchSpec {
  Dimensions dims;
  SearchMode mode = SearchMode::exhaustive;
  std::uint64_t seed = 0;
  std::uint64_t budget = 1;
  std::uint64_t enumeration_limit = kDefaultEnumerationLimit;
  long max_denominator = kDefaultMaxDenominator;
};

/// Throws InvalidArgument for zero cardinalities or a zero budget.
void check_spec(const SearchSpec& spec);

struct TraceEntry {
  std::uint64_t iteration = 0;
  Rational s_max;
};

struct SearchResult {
  SearchSpec spec;
  ContextualModel best_model;
  Rational best_s_max;
  std::uint64_t iterations = 0;
  std::vector<TraceEntry> trace;  // strict improvements of the running best
  std::string rng_algorithm = kRngAlgorithm;
};

/// Exact s_max of a model (max over the eight CHSH patterns).
Rational s_max_of(const ContextualModel& model);

/// Number of +-1 table assignments for the given cardinalities, saturating.
std::uint64_t table_assignment_count(const Dimensions& dims);

/// Every +-1 assignment of the four response tables with the pmfs of
/// `pmf_template` held fixed. Ties on s_max go to the lowest assignment
/// index. Throws SizeExceeded beyond `limit` assignments.
SearchResult enumerate_tables(const ContextualModel& pmf_template, std::uint64_t limit, Exec exec = Exec::parallel);

/// enumerate_tables with uniform pmfs of the spec's cardinalities.
SearchResult enumerate_deterministic(const SearchSpec& spec, Exec exec = Exec::parallel);

/// Pmf with denominator drawn from [1, max_denominator]; zero weights allowed.
Pmf random_pmf(std::size_t n, Rng& rng, long max_denominator = kDefaultMaxDenominator);
ContextualModel random_model(const Dimensions& dims, Rng& rng, long max_denominator = kDefaultMaxDenominator);
/// Each of the six cardinalities uniform in [1, max_cardinality].
Dimensions random_dimensions(Rng& rng, std::size_t max_cardinality);

/// Sample i is random_model seeded by derive_seed(spec.seed, i). Ties go to
/// the lexicographically smallest model serialization.
SearchResult random_search(const SearchSpec& spec, Exec exec = Exec::parallel);

/// First-improvement local search over single table flips and rational pmf
/// transfers of 1/max_denominator, with random restarts. `budget` counts
/// model evaluations, the start included.
SearchResult hill_climb(const SearchSpec& spec, const std::optional<ContextualModel>& start = std::nullopt);

SearchResult run_search(const SearchSpec& spec, Exec exec = Exec::parallel);

nlohmann::json search_result_json(const SearchResult& result);

}  // namespace bell
