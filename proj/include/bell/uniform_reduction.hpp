#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "bell/exact_engine.hpp"
#include "bell/model.hpp"

namespace bell {

/// Inverse-transform map of a pmf onto [0, 1]: interval i is
/// (breakpoints[i], breakpoints[i+1]] and carries support index labels[i].
/// Zero-weight support points keep their (empty) interval so that interval i
/// always corresponds to support point i.
struct IntervalPartition {
  std::vector<Rational> breakpoints;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  Rational width(std::size_t i) const { return breakpoints[i + 1] - breakpoints[i]; }
};

IntervalPartition inverse_transform_partition(const Pmf& pmf);

/// Comonotone coupling: weight(i, j) = |interval_i(a) intersect interval_j(b)|.
JointPmf couple_settings(const Pmf& a, const Pmf& b);

/// Common refinement of one side's two partitions. Each cell is a
/// positive-width subinterval of [0, 1] on which both settings' local
/// variables are constant.
struct RefinedCell {
  Rational lower;
  Rational upper;
  std::array<std::size_t, 2> local{};  // local value under setting 0 and 1
};

/// Deterministic map U -> (l_setting0, l_setting1) for one station.
class SideMap {
 public:
  SideMap() = default;
  SideMap(const Pmf& setting0, const Pmf& setting1);

  const std::array<IntervalPartition, 2>& partitions() const noexcept { return partitions_; }
  const std::vector<RefinedCell>& cells() const noexcept { return cells_; }

  /// Cell containing the dyadic uniform k / 2^53. Boundary points belong to
  /// the interval they close on the right; u = 0 goes to the first cell.
  std::size_t cell_at(std::uint64_t k53) const;
  std::size_t local_value(std::size_t cell, int setting) const {
    return cells_[cell].local[static_cast<std::size_t>(setting)];
  }

 private:
  std::array<IntervalPartition, 2> partitions_;
  std::vector<RefinedCell> cells_;
  std::vector<std::uint64_t> thresholds_;  // floor(upper * 2^53) per cell
};

inline constexpr unsigned kUniformBits = 53;

/// The model rewritten so that each station's only setting-independent local
/// randomness is one uniform (U1 for Alice, U2 for Bob); all setting
/// dependence lives in the deterministic maps and the response tables.
struct ReducedModel {
  ContextualModel original;  // source pmf and response tables are used unchanged
  SideMap alice;
  SideMap bob;
};

/// Throws InvalidModel.
ReducedModel reduce_model(const ContextualModel& model);

/// E(A_a B_b) under the reduced model by exact quadrature over
/// refined cells x source pairs.
Rational reduced_expectation(const ReducedModel& reduced, ContextIndex ctx);

struct ReductionRecord {
  CorrelationSet dedicated;
  CorrelationSet reduced;
  bool marginals_preserved = false;
  bool equal = false;
};

ReductionRecord verify_reduction(const ContextualModel& model);

/// Model JSON extended with per-setting `partition` breakpoints and the
/// refined per-side cells under `reduction`.
nlohmann::json reduced_model_json(const ReducedModel& reduced);

}  // namespace bell
