#include "bell/chsh.hpp"

#include "bell/errors.hpp"
#include "bell/model_io.hpp"

namespace bell {

using nlohmann::json;

const std::array<std::array<int, 4>, 8>& chsh_patterns() {
  static const auto patterns = [] {
    std::array<std::array<int, 4>, 8> p{};
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t i = 0; i < 4; ++i) {
        p[k][i] = i == k ? -1 : 1;
        p[k + 4][i] = -p[k][i];
      }
    }
    return p;
  }();
  return patterns;
}

ChshReport chsh_from_correlations(const CorrelationSet& c) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (abs(c.values[i]) > Rational(1)) {
      throw InvalidArgument("correlation " + std::to_string(i) + " = " + c.values[i].str() + " outside [-1, 1]");
    }
  }
  ChshReport r;
  for (std::size_t k = 0; k < 8; ++k) {
    auto& s = r.sums[k];
    s.signs = chsh_patterns()[k];
    for (std::size_t i = 0; i < 4; ++i) {
      s.value += s.signs[i] > 0 ? c.values[i] : -c.values[i];
    }
    r.s_max = std::max(r.s_max, abs(s.value));
  }
  r.bound_satisfied = r.s_max <= Rational(2);
  return r;
}

LhvCertificate certify_lhv_bound(const ContextualModel& model) {
  LhvCertificate cert;
  cert.correlations = correlation_set(model);
  cert.report = chsh_from_correlations(cert.correlations);
  cert.model_hash = model_hash(model);
  return cert;
}

json chsh_json(const ChshReport& report) {
  json sums = json::array();
  for (const auto& s : report.sums) sums.push_back({{"signs", s.signs}, {"sum", rational_json(s.value)}});
  return {{"sums", sums}, {"s_max", rational_json(report.s_max)}, {"bound", "2"},
          {"bound_satisfied", report.bound_satisfied}};
}

json correlations_json(const ContextualModel& model, const CorrelationSet& c) {
  json out = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto ctx = labels(model, kContexts[i]);
    auto entry = rational_json(c.values[i]);
    entry["alice"] = ctx.alice;
    entry["bob"] = ctx.bob;
    out.push_back(entry);
  }
  return out;
}

json certificate_json(const ContextualModel& model, const LhvCertificate& cert) {
  return {{"model_sha256", cert.model_hash},
          {"correlations", correlations_json(model, cert.correlations)},
          {"chsh", chsh_json(cert.report)},
          {"verdict", cert.report.bound_satisfied ? "satisfied" : "violated"}};
}

}  // namespace bell
