#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "bell/exact_engine.hpp"
#include "bell/model.hpp"

namespace bell {

/// sum_i signs[i] * e_i with e in kContexts order.
struct ChshSum {
  std::array<int, 4> signs{};
  Rational value;
};

/// All eight one-term-negated CHSH combinations and their negations.
struct ChshReport {
  std::array<ChshSum, 8> sums;
  Rational s_max;
  bool bound_satisfied = false;  // s_max <= 2
};

/// The eight sign patterns: indices 0-3 negate term k, 4-7 are their negations.
const std::array<std::array<int, 4>, 8>& chsh_patterns();

/// Throws InvalidArgument when a correlation lies outside [-1, 1].
ChshReport chsh_from_correlations(const CorrelationSet& c);

struct LhvCertificate {
  std::string model_hash;
  CorrelationSet correlations;
  ChshReport report;
};

/// Exact correlations plus CHSH report. A valid model always satisfies the
/// bound; `report.bound_satisfied == false` here means the engine is broken.
LhvCertificate certify_lhv_bound(const ContextualModel& model);

nlohmann::json chsh_json(const ChshReport& report);
nlohmann::json correlations_json(const ContextualModel& model, const CorrelationSet& c);
nlohmann::json certificate_json(const ContextualModel& model, const LhvCertificate& cert);

}  // namespace bell
