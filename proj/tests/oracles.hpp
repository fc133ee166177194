// Independent reference computations for tests. Nothing here calls into the
// engine's evaluation paths; models are read field by field and every sum is
// a brute-force enumeration with raw GMP rationals.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "bell/model.hpp"

namespace oracle {

inline mpq_class q(const bell::Rational& r) { return r.raw(); }

/// Flat enumeration of the full six-coordinate product space with l1 as the
/// fastest-varying digit; returns sum of weight * prod(selected outcomes).
inline mpq_class product_space_moment(const bell::ContextualModel& m, std::array<bool, 2> alice, std::array<bool, 2> bob) {
  const std::size_t radix[6] = {m.source.weights.size(),     m.source.weights[0].size(),
                                m.alice[0].pmf.weights.size(), m.alice[1].pmf.weights.size(),
                                m.bob[0].pmf.weights.size(),   m.bob[1].pmf.weights.size()};
  std::uint64_t total = 1;
  for (auto r : radix) total *= r;
  mpq_class sum = 0;
  for (std::uint64_t flat = 0; flat < total; ++flat) {
    std::size_t d[6];
    std::uint64_t rest = flat;
    for (int i = 0; i < 6; ++i) {
      d[i] = rest % radix[i];
      rest /= radix[i];
    }
    mpq_class w = q(m.source.weights[d[0]][d[1]]) * q(m.alice[0].pmf.weights[d[2]]) *
                  q(m.alice[1].pmf.weights[d[3]]) * q(m.bob[0].pmf.weights[d[4]]) * q(m.bob[1].pmf.weights[d[5]]);
    int v = 1;
    if (alice[0]) v *= m.alice[0].table.values[d[0]][d[2]];
    if (alice[1]) v *= m.alice[1].table.values[d[0]][d[3]];
    if (bob[0]) v *= m.bob[0].table.values[d[1]][d[4]];
    if (bob[1]) v *= m.bob[1].table.values[d[1]][d[5]];
    sum += v * w;
  }
  return sum;
}

inline mpq_class expectation(const bell::ContextualModel& m, int a, int b) {
  std::array<bool, 2> alice{};
  std::array<bool, 2> bob{};
  alice[static_cast<std::size_t>(a)] = true;
  bob[static_cast<std::size_t>(b)] = true;
  return product_space_moment(m, alice, bob);
}

/// Mass of product-space cell (l1, l2, lx, lx', ly, ly').
inline mpq_class cell_mass(const bell::ContextualModel& m, const std::array<std::size_t, 6>& d) {
  return q(m.source.weights[d[0]][d[1]]) * q(m.alice[0].pmf.weights[d[2]]) * q(m.alice[1].pmf.weights[d[3]]) *
         q(m.bob[0].pmf.weights[d[4]]) * q(m.bob[1].pmf.weights[d[5]]);
}

/// Max |sum| over every sign vector with an odd number of minus signs.
inline mpq_class chsh_max(const std::array<mpq_class, 4>& e) {
  mpq_class best = 0;
  for (int mask = 0; mask < 16; ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) % 2 == 0) continue;
    mpq_class s = 0;
    for (int i = 0; i < 4; ++i) s += ((mask >> i) & 1) ? -e[static_cast<std::size_t>(i)] : e[static_cast<std::size_t>(i)];
    if (abs(s) > best) best = abs(s);
  }
  return best;
}

/// Coupling by walking unit cells of width 1/L, L the lcm of all
/// denominators, and classifying each cell midpoint in both pmfs.
inline std::map<std::pair<std::size_t, std::size_t>, mpq_class> grid_coupling(const bell::Pmf& a, const bell::Pmf& b) {
  mpz_class L = 1;
  for (const auto* p : {&a, &b}) {
    for (const auto& w : p->weights) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q(w).get_den_mpz_t());
  }
  auto locate = [](const bell::Pmf& p, const mpq_class& u) {
    mpq_class c = 0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      c += q(p.weights[i]);
      if (u < c) return i;
    }
    return p.weights.size() - 1;
  };
  std::map<std::pair<std::size_t, std::size_t>, mpq_class> out;
  const long n = L.get_si();
  for (long k = 0; k < n; ++k) {
    mpq_class mid(2 * k + 1, 2 * n);
    mid.canonicalize();
    out[{locate(a, mid), locate(b, mid)}] += mpq_class(1, n);
  }
  return out;
}

}  // namespace oracle
