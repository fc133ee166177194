#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bell/exact_engine.hpp"
#include "bell/model.hpp"
#include "bell/parallel.hpp"

namespace bell {

inline constexpr std::uint64_t kDefaultCellLimit = 10'000'000;

/// A point of the product space L1 x L2 x Lx x Lx' x Ly x Ly'.
struct UnifiedPoint {
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  std::array<std::size_t, 2> alice_local{};  // (lx, lx')
  std::array<std::size_t, 2> bob_local{};    // (ly, ly')
};

/// Which lifted functions a product observable multiplies together, e.g.
/// E(A_x B_y') selects alice {true,false} and bob {false,true}.
struct Observable {
  std::array<bool, 2> alice{};
  std::array<bool, 2> bob{};

  static Observable cross(ContextIndex ctx);
};

/// One probability space carrying all four measurement functions.
///
/// The pmf p(l1,l2) p_x(lx) p_x'(lx') p_y(ly) p_y'(ly') is held as its six
/// factors; cells are only materialized by expand() or the expanded
/// evaluation strategy, both bounded by cell_limit.
class UnifiedModel {
 public:
  UnifiedModel(ContextualModel model, std::uint64_t cell_limit);

  const ContextualModel& factors() const noexcept { return model_; }
  const Dimensions& dimensions() const noexcept { return dims_; }
  std::uint64_t size() const noexcept { return size_; }
  std::uint64_t cell_limit() const noexcept { return cell_limit_; }

  /// Mixed-radix decode, last coordinate (ly') fastest.
  UnifiedPoint point(std::uint64_t index) const;
  Rational mass(const UnifiedPoint& p) const;

  /// A(lambda, setting) = A_setting(l1, l_setting).
  int alice(const UnifiedPoint& p, int setting) const;
  /// B(lambda, setting) = B_setting(l2, l_setting).
  int bob(const UnifiedPoint& p, int setting) const;
  int value(const UnifiedPoint& p, const Observable& obs) const;

  /// Every cell's mass in index order. Throws SizeExceeded past cell_limit.
  std::vector<Rational> expand() const;
  void require_expandable() const;

 private:
  ContextualModel model_;
  Dimensions dims_;
  std::uint64_t size_;
  std::uint64_t cell_limit_;
};

enum class Strategy {
  /// Sums only over the factors the observable reads; others marginalize to 1.
  factorized,
  /// Literal sum over every cell of the product space.
  expanded,
};

/// Throws InvalidModel. Never throws SizeExceeded; expansion is what is guarded.
UnifiedModel build_unified(const ContextualModel& model, std::uint64_t cell_limit = kDefaultCellLimit);

Rational expectation_of(const UnifiedModel& u, const Observable& obs, Strategy strategy = Strategy::factorized,
                        Exec exec = Exec::parallel);
Rational expectation_unified(const UnifiedModel& u, const Context& ctx, Strategy strategy = Strategy::factorized,
                             Exec exec = Exec::parallel);
Rational expectation_unified(const UnifiedModel& u, ContextIndex ctx, Strategy strategy = Strategy::factorized,
                             Exec exec = Exec::parallel);

struct CounterfactualSet {
  Rational alice_pair;  // E(A_x A_x')
  Rational bob_pair;    // E(B_y B_y')
  Rational all_four;    // E(A_x A_x' B_y B_y')
  CorrelationSet cross;

  friend bool operator==(const CounterfactualSet&, const CounterfactualSet&) = default;
};

CounterfactualSet counterfactuals(const UnifiedModel& u, Strategy strategy = Strategy::factorized,
                                  Exec exec = Exec::parallel);

struct EquivalenceEntry {
  Context context;
  Rational dedicated;   // four-fold sum over the context's own space
  Rational unified;     // literal sum over the expanded product space
  Rational factorized;  // factor-aware sum over the product space
};

struct EquivalenceRecord {
  std::array<EquivalenceEntry, 4> entries;
  bool equal = false;
};

/// Compares dedicated-space and product-space correlations exactly.
/// Mismatches are reported through `equal`; SizeExceeded propagates when the
/// product space is larger than cell_limit.
EquivalenceRecord verify_equivalence(const ContextualModel& model, std::uint64_t cell_limit = kDefaultCellLimit,
                                     Exec exec = Exec::parallel);

}  // namespace bell
