#pragma once

#include <array>

#include "bell/model.hpp"
#include "bell/rational.hpp"

namespace bell {

/// The four context correlations, indexed in kContexts order.
struct CorrelationSet {
  std::array<Rational, 4> values;

  const Rational& xy() const { return values[0]; }
  const Rational& xy_prime() const { return values[1]; }
  const Rational& x_prime_y() const { return values[2]; }
  const Rational& x_prime_y_prime() const { return values[3]; }
  const Rational& operator[](ContextIndex ctx) const { return values[static_cast<std::size_t>(2 * ctx.alice + ctx.bob)]; }

  friend bool operator==(const CorrelationSet&, const CorrelationSet&) = default;
};

/// E(A_a B_b) over the context's dedicated space: the four-fold sum over
/// (l1, l2, la, lb) of A_a(l1,la) B_b(l2,lb) p_a(la) p_b(lb) p(l1,l2).
/// Throws InvalidModel or UnknownSetting.
Rational expectation_in_context(const ContextualModel& model, const Context& ctx);
Rational expectation_in_context(const ContextualModel& model, ContextIndex ctx);

CorrelationSet correlation_set(const ContextualModel& model);

namespace detail {
/// Same sum without the validity check; callers guarantee a valid model.
Rational dedicated_sum(const ContextualModel& model, ContextIndex ctx);
CorrelationSet dedicated_correlations(const ContextualModel& model);
}  // namespace detail

}  // namespace bell
