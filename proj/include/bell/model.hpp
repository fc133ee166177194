#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bell/rational.hpp"

namespace bell {

enum class Side { alice, bob };

const char* to_string(Side side);

/// Probability mass function over a finite, index-identified support.
struct Pmf {
  std::vector<Rational> weights;

  std::size_t size() const { return weights.size(); }
  const Rational& operator[](std::size_t i) const { return weights[i]; }

  static Pmf uniform(std::size_t n);
  static Pmf point();
};

/// Joint pmf p(l1, l2) of the two source variables, row index l1.
struct JointPmf {
  std::vector<std::vector<Rational>> weights;

  std::size_t rows() const { return weights.size(); }
  std::size_t cols() const { return weights.empty() ? 0 : weights.front().size(); }
  const Rational& operator()(std::size_t l1, std::size_t l2) const { return weights[l1][l2]; }

  /// Marginal over l1 (row sums) or over l2 (column sums).
  Pmf alice_marginal() const;
  Pmf bob_marginal() const;
};

/// Outcome table indexed by (source index, local index). Entries are +1/-1
/// for well-formed models; other integers are representable so that
/// validation can report them.
struct ResponseTable {
  Side side = Side::alice;
  std::string setting;
  std::vector<std::vector<int>> values;

  int operator()(std::size_t source, std::size_t local) const { return values[source][local]; }
};

/// One measurement setting at one station: local hidden-variable pmf plus
/// the response table that reads (source variable, local variable).
struct LocalSetting {
  std::string label;
  Pmf pmf;
  ResponseTable table;
};

/// Contextual local-hidden-variable model.
///
/// Each side carries exactly two settings; position 0 plays the role of
/// x (resp. y) and position 1 of x' (resp. y'). Labels must be listed in
/// strictly ascending order so that the JSON form (keys sorted) is
/// unambiguous.
struct ContextualModel {
  JointPmf source;
  std::vector<LocalSetting> alice;
  std::vector<LocalSetting> bob;
};

/// A pair of setting positions, 0 or 1 on each side.
struct ContextIndex {
  int alice = 0;
  int bob = 0;

  friend bool operator==(const ContextIndex&, const ContextIndex&) = default;
};

/// Setting pair by label, as users name it.
struct Context {
  std::string alice;
  std::string bob;
};

/// The four contexts in the fixed report order (x,y) (x,y') (x',y) (x',y').
inline constexpr ContextIndex kContexts[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

/// Resolves labels to positions; throws UnknownSetting.
ContextIndex resolve(const ContextualModel& model, const Context& ctx);
Context labels(const ContextualModel& model, ContextIndex ctx);

struct Dimensions {
  std::size_t source_alice = 0;  // |L1|
  std::size_t source_bob = 0;    // |L2|
  std::size_t alice_local[2] = {0, 0};
  std::size_t bob_local[2] = {0, 0};

  /// Product of all six cardinalities, saturating at UINT64_MAX.
  std::uint64_t unified_size() const;

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// Every invariant violation with a locator such as `alice[x].table[1][0]`.
/// Empty iff the model is well-formed. Never throws on malformed content.
std::vector<std::string> validate_model(const ContextualModel& model);

/// Throws InvalidModel carrying validate_model's output when non-empty.
void require_valid(const ContextualModel& model);

/// Throws InvalidModel on malformed input.
Dimensions model_dimensions(const ContextualModel& model);

/// Small hand-checkable models used throughout tests, docs and bundled files.
namespace fixtures {
/// Every space a singleton, every outcome +1.
ContextualModel m0();
/// m0 with A_x' = -1.
ContextualModel m1();
/// Perfectly correlated two-point source, singleton locals.
ContextualModel m2();
/// m2 with two-point local spaces everywhere; only A_x reads its local variable.
ContextualModel m3();
}  // namespace fixtures

}  // namespace bell
