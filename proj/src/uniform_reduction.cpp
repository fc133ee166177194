#include "bell/uniform_reduction.hpp"

#include <algorithm>

#include "bell/errors.hpp"
#include "bell/model_io.hpp"

namespace bell {

using nlohmann::json;

IntervalPartition inverse_transform_partition(const Pmf& pmf) {
  IntervalPartition p;
  Rational cumulative;
  p.breakpoints.push_back(cumulative);
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    cumulative += pmf[i];
    p.breakpoints.push_back(cumulative);
    p.labels.push_back(i);
  }
  return p;
}

namespace {

// Sweeps two partitions of [0, 1] and calls emit(lower, upper, i, j) for every
// positive-width overlap of interval i of `a` with interval j of `b`.
template <typename Emit>
void sweep(const IntervalPartition& a, const IntervalPartition& b, Emit&& emit) {
  std::size_t i = 0;
  std::size_t j = 0;
  Rational lower;
  while (i < a.size() && j < b.size()) {
    const Rational& ua = a.breakpoints[i + 1];
    const Rational& ub = b.breakpoints[j + 1];
    const Rational upper = std::min(ua, ub);
    if (upper > lower) {
      emit(lower, upper, a.labels[i], b.labels[j]);
      lower = upper;
    }
    if (ua <= upper) ++i;
    if (ub <= upper) ++j;
  }
}

}  // namespace

JointPmf couple_settings(const Pmf& a, const Pmf& b) {
  JointPmf joint;
  joint.weights.assign(a.size(), std::vector<Rational>(b.size()));
  sweep(inverse_transform_partition(a), inverse_transform_partition(b),
        [&](const Rational& lo, const Rational& hi, std::size_t i, std::size_t j) { joint.weights[i][j] += hi - lo; });
  return joint;
}

SideMap::SideMap(const Pmf& setting0, const Pmf& setting1)
    : partitions_{inverse_transform_partition(setting0), inverse_transform_partition(setting1)} {
  sweep(partitions_[0], partitions_[1], [&](const Rational& lo, const Rational& hi, std::size_t i, std::size_t j) {
    cells_.push_back(RefinedCell{lo, hi, {i, j}});
    thresholds_.push_back(hi.dyadic_floor(kUniformBits));
  });
}

std::size_t SideMap::cell_at(std::uint64_t k53) const {
  const auto it = std::lower_bound(thresholds_.begin(), thresholds_.end(), k53);
  if (it == thresholds_.end()) return cells_.size() - 1;
  return static_cast<std::size_t>(it - thresholds_.begin());
}

ReducedModel reduce_model(const ContextualModel& model) {
  require_valid(model);
  ReducedModel r;
  r.original = model;
  r.alice = SideMap(model.alice[0].pmf, model.alice[1].pmf);
  r.bob = SideMap(model.bob[0].pmf, model.bob[1].pmf);
  return r;
}

Rational reduced_expectation(const ReducedModel& reduced, ContextIndex ctx) {
  const auto& m = reduced.original;
  const auto& ta = m.alice[static_cast<std::size_t>(ctx.alice)].table;
  const auto& tb = m.bob[static_cast<std::size_t>(ctx.bob)].table;
  Rational total;
  for (std::size_t l1 = 0; l1 < m.source.rows(); ++l1) {
    for (std::size_t l2 = 0; l2 < m.source.cols(); ++l2) {
      const Rational& p = m.source(l1, l2);
      if (p.is_zero()) continue;
      Rational inner;
      for (std::size_t ca = 0; ca < reduced.alice.cells().size(); ++ca) {
        const auto& cell_a = reduced.alice.cells()[ca];
        const Rational wa = cell_a.upper - cell_a.lower;
        const int a = ta(l1, reduced.alice.local_value(ca, ctx.alice));
        for (std::size_t cb = 0; cb < reduced.bob.cells().size(); ++cb) {
          const auto& cell_b = reduced.bob.cells()[cb];
          const Rational w = wa * (cell_b.upper - cell_b.lower);
          if (a * tb(l2, reduced.bob.local_value(cb, ctx.bob)) > 0) {
            inner += w;
          } else {
            inner -= w;
          }
        }
      }
      total += p * inner;
    }
  }
  return total;
}

namespace {

bool marginals_match(const SideMap& map, const std::vector<LocalSetting>& settings) {
  for (std::size_t s = 0; s < 2; ++s) {
    std::vector<Rational> mass(settings[s].pmf.size());
    for (const auto& c : map.cells()) mass[c.local[s]] += c.upper - c.lower;
    if (mass != settings[s].pmf.weights) return false;
  }
  return true;
}

}  // namespace

ReductionRecord verify_reduction(const ContextualModel& model) {
  const auto reduced = reduce_model(model);
  ReductionRecord rec;
  rec.dedicated = detail::dedicated_correlations(model);
  for (std::size_t i = 0; i < 4; ++i) rec.reduced.values[i] = reduced_expectation(reduced, kContexts[i]);
  rec.marginals_preserved = marginals_match(reduced.alice, model.alice) && marginals_match(reduced.bob, model.bob);
  rec.equal = rec.marginals_preserved && rec.dedicated == rec.reduced;
  return rec;
}

json reduced_model_json(const ReducedModel& reduced) {
  auto doc = model_to_json(reduced.original);
  auto side = [&](const SideMap& map, const std::vector<LocalSetting>& settings, const char* key) {
    json cells = json::array();
    for (const auto& c : map.cells()) {
      cells.push_back({{"lower", c.lower.str()},
                       {"upper", c.upper.str()},
                       {settings[0].label, c.local[0]},
                       {settings[1].label, c.local[1]}});
    }
    for (std::size_t s = 0; s < 2; ++s) {
      json bp = json::array();
      for (const auto& b : map.partitions()[s].breakpoints) bp.push_back(b.str());
      doc[key][settings[s].label]["partition"] = bp;
    }
    return cells;
  };
  doc["reduction"] = {{"alice", side(reduced.alice, reduced.original.alice, "alice")},
                      {"bob", side(reduced.bob, reduced.original.bob, "bob")},
                      {"uniform_bits", kUniformBits}};
  return doc;
}

}  // namespace bell
