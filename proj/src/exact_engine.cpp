#include "bell/exact_engine.hpp"

#include "bell/errors.hpp"

namespace bell {

namespace detail {

Rational dedicated_sum(const ContextualModel& model, ContextIndex ctx) {
  const auto& a = model.alice[static_cast<std::size_t>(ctx.alice)];
  const auto& b = model.bob[static_cast<std::size_t>(ctx.bob)];
  Rational total;
  for (std::size_t l1 = 0; l1 < model.source.rows(); ++l1) {
    for (std::size_t l2 = 0; l2 < model.source.cols(); ++l2) {
      const Rational& p = model.source(l1, l2);
      if (p.is_zero()) continue;
      Rational inner;
      for (std::size_t la = 0; la < a.pmf.size(); ++la) {
        for (std::size_t lb = 0; lb < b.pmf.size(); ++lb) {
          Rational term = a.pmf[la] * b.pmf[lb];
          if (a.table(l1, la) * b.table(l2, lb) < 0) term = -term;
          inner += term;
        }
      }
      total += inner * p;
    }
  }
  return total;
}

CorrelationSet dedicated_correlations(const ContextualModel& model) {
  CorrelationSet c;
  for (std::size_t i = 0; i < 4; ++i) c.values[i] = dedicated_sum(model, kContexts[i]);
  return c;
}

}  // namespace detail

Rational expectation_in_context(const ContextualModel& model, ContextIndex ctx) {
  require_valid(model);
  if (ctx.alice < 0 || ctx.alice > 1 || ctx.bob < 0 || ctx.bob > 1) throw UnknownSetting("context index out of range");
  return detail::dedicated_sum(model, ctx);
}

Rational expectation_in_context(const ContextualModel& model, const Context& ctx) {
  require_valid(model);
  return detail::dedicated_sum(model, resolve(model, ctx));
}

CorrelationSet correlation_set(const ContextualModel& model) {
  require_valid(model);
  return detail::dedicated_correlations(model);
}

}  // namespace bell
