#include "bell/unified_space.hpp"

#include <omp.h>

#include "bell/errors.hpp"

namespace bell {

Observable Observable::cross(ContextIndex ctx) {
  Observable o;
  o.alice[static_cast<std::size_t>(ctx.alice)] = true;
  o.bob[static_cast<std::size_t>(ctx.bob)] = true;
  return o;
}

UnifiedModel::UnifiedModel(ContextualModel model, std::uint64_t cell_limit)
    : model_(std::move(model)), dims_(model_dimensions(model_)), size_(dims_.unified_size()), cell_limit_(cell_limit) {}

UnifiedPoint UnifiedModel::point(std::uint64_t index) const {
  UnifiedPoint p;
  p.bob_local[1] = index % dims_.bob_local[1];
  index /= dims_.bob_local[1];
  p.bob_local[0] = index % dims_.bob_local[0];
  index /= dims_.bob_local[0];
  p.alice_local[1] = index % dims_.alice_local[1];
  index /= dims_.alice_local[1];
  p.alice_local[0] = index % dims_.alice_local[0];
  index /= dims_.alice_local[0];
  p.l2 = index % dims_.source_bob;
  p.l1 = index / dims_.source_bob;
  return p;
}

Rational UnifiedModel::mass(const UnifiedPoint& p) const {
  Rational m = model_.source(p.l1, p.l2);
  for (std::size_t s = 0; s < 2; ++s) {
    m *= model_.alice[s].pmf[p.alice_local[s]];
    m *= model_.bob[s].pmf[p.bob_local[s]];
  }
  return m;
}

int UnifiedModel::alice(const UnifiedPoint& p, int setting) const {
  const auto s = static_cast<std::size_t>(setting);
  return model_.alice[s].table(p.l1, p.alice_local[s]);
}

int UnifiedModel::bob(const UnifiedPoint& p, int setting) const {
  const auto s = static_cast<std::size_t>(setting);
  return model_.bob[s].table(p.l2, p.bob_local[s]);
}

int UnifiedModel::value(const UnifiedPoint& p, const Observable& obs) const {
  int v = 1;
  for (int s = 0; s < 2; ++s) {
    if (obs.alice[static_cast<std::size_t>(s)]) v *= alice(p, s);
    if (obs.bob[static_cast<std::size_t>(s)]) v *= bob(p, s);
  }
  return v;
}

void UnifiedModel::require_expandable() const {
  if (size_ > cell_limit_) throw SizeExceeded("product space expansion", size_, cell_limit_);
}

std::vector<Rational> UnifiedModel::expand() const {
  require_expandable();
  std::vector<Rational> cells;
  cells.reserve(size_);
  for (std::uint64_t i = 0; i < size_; ++i) cells.push_back(mass(point(i)));
  return cells;
}

UnifiedModel build_unified(const ContextualModel& model, std::uint64_t cell_limit) {
  return UnifiedModel(model, cell_limit);
}

namespace {

// Sum over the four local coordinates for one source pair (l1, l2), with the
// source weight applied by the caller.
Rational expanded_local_block(const UnifiedModel& u, const Observable& obs, std::size_t l1, std::size_t l2) {
  const auto& m = u.factors();
  const auto& d = u.dimensions();
  UnifiedPoint p;
  p.l1 = l1;
  p.l2 = l2;
  Rational block;
  for (p.alice_local[0] = 0; p.alice_local[0] < d.alice_local[0]; ++p.alice_local[0]) {
    const Rational& w0 = m.alice[0].pmf[p.alice_local[0]];
    for (p.alice_local[1] = 0; p.alice_local[1] < d.alice_local[1]; ++p.alice_local[1]) {
      const Rational w1 = w0 * m.alice[1].pmf[p.alice_local[1]];
      for (p.bob_local[0] = 0; p.bob_local[0] < d.bob_local[0]; ++p.bob_local[0]) {
        const Rational w2 = w1 * m.bob[0].pmf[p.bob_local[0]];
        for (p.bob_local[1] = 0; p.bob_local[1] < d.bob_local[1]; ++p.bob_local[1]) {
          const Rational w = w2 * m.bob[1].pmf[p.bob_local[1]];
          if (u.value(p, obs) > 0) {
            block += w;
          } else {
            block -= w;
          }
        }
      }
    }
  }
  return block;
}

Rational expanded_sum(const UnifiedModel& u, const Observable& obs, Exec exec) {
  u.require_expandable();
  const auto& src = u.factors().source;
  const std::size_t rows = src.rows();
  const std::size_t cols = src.cols();
  const std::size_t pairs = rows * cols;
  std::vector<Rational> partial(pairs);

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::size_t k = 0; k < pairs; ++k) {
      const std::size_t l1 = k / cols;
      const std::size_t l2 = k % cols;
      partial[k] = expanded_local_block(u, obs, l1, l2) * src(l1, l2);
    }
  } else {
    for (std::size_t k = 0; k < pairs; ++k) {
      const std::size_t l1 = k / cols;
      const std::size_t l2 = k % cols;
      partial[k] = expanded_local_block(u, obs, l1, l2) * src(l1, l2);
    }
  }

  Rational total;
  for (const auto& p : partial) total += p;
  return total;
}

// Product of the selected lifted functions on one side, integrated against
// that side's local pmfs, as a function of the side's source index.
std::vector<Rational> side_factor(const std::vector<LocalSetting>& settings, const std::array<bool, 2>& selected,
                                  std::size_t source_size) {
  std::vector<Rational> f(source_size, Rational(1));
  for (std::size_t s = 0; s < 2; ++s) {
    if (!selected[s]) continue;
    const auto& setting = settings[s];
    for (std::size_t l = 0; l < source_size; ++l) {
      Rational mean;
      for (std::size_t k = 0; k < setting.pmf.size(); ++k) {
        if (setting.table(l, k) > 0) {
          mean += setting.pmf[k];
        } else {
          mean -= setting.pmf[k];
        }
      }
      f[l] *= mean;
    }
  }
  return f;
}

Rational factorized_sum(const UnifiedModel& u, const Observable& obs) {
  const auto& m = u.factors();
  const auto fa = side_factor(m.alice, obs.alice, m.source.rows());
  const auto fb = side_factor(m.bob, obs.bob, m.source.cols());
  Rational total;
  for (std::size_t l1 = 0; l1 < m.source.rows(); ++l1) {
    for (std::size_t l2 = 0; l2 < m.source.cols(); ++l2) {
      const Rational& p = m.source(l1, l2);
      if (p.is_zero()) continue;
      total += p * fa[l1] * fb[l2];
    }
  }
  return total;
}

}  // namespace

Rational expectation_of(const UnifiedModel& u, const Observable& obs, Strategy strategy, Exec exec) {
  return strategy == Strategy::expanded ? expanded_sum(u, obs, exec) : factorized_sum(u, obs);
}

Rational expectation_unified(const UnifiedModel& u, ContextIndex ctx, Strategy strategy, Exec exec) {
  if (ctx.alice < 0 || ctx.alice > 1 || ctx.bob < 0 || ctx.bob > 1) throw UnknownSetting("context index out of range");
  return expectation_of(u, Observable::cross(ctx), strategy, exec);
}

Rational expectation_unified(const UnifiedModel& u, const Context& ctx, Strategy strategy, Exec exec) {
  return expectation_of(u, Observable::cross(resolve(u.factors(), ctx)), strategy, exec);
}

CounterfactualSet counterfactuals(const UnifiedModel& u, Strategy strategy, Exec exec) {
  CounterfactualSet c;
  c.alice_pair = expectation_of(u, Observable{{true, true}, {false, false}}, strategy, exec);
  c.bob_pair = expectation_of(u, Observable{{false, false}, {true, true}}, strategy, exec);
  c.all_four = expectation_of(u, Observable{{true, true}, {true, true}}, strategy, exec);
  for (std::size_t i = 0; i < 4; ++i) c.cross.values[i] = expectation_unified(u, kContexts[i], strategy, exec);
  return c;
}

EquivalenceRecord verify_equivalence(const ContextualModel& model, std::uint64_t cell_limit, Exec exec) {
  const auto dedicated = correlation_set(model);
  const auto u = build_unified(model, cell_limit);
  EquivalenceRecord rec;
  rec.equal = true;
  for (std::size_t i = 0; i < 4; ++i) {
    auto& e = rec.entries[i];
    e.context = labels(model, kContexts[i]);
    e.dedicated = dedicated.values[i];
    e.unified = expectation_unified(u, kContexts[i], Strategy::expanded, exec);
    e.factorized = expectation_unified(u, kContexts[i], Strategy::factorized, exec);
    rec.equal = rec.equal && e.dedicated == e.unified && e.dedicated == e.factorized;
  }
  return rec;
}

}  // namespace bell
