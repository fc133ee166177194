#include "bell/strategy_search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <omp.h>

#include "bell/chsh.hpp"
#include "bell/errors.hpp"
#include "bell/exact_engine.hpp"
#include "bell/model_io.hpp"

namespace bell {

using nlohmann::json;

const char* to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::exhaustive:
      return "exhaustive";
    case SearchMode::random_sampling:
      return "random";
    case SearchMode::hill_climb:
      return "hill-climb";
  }
  return "?";
}

SearchMode parse_search_mode(const std::string& text) {
  if (text == "exhaustive") return SearchMode::exhaustive;
  if (text == "random") return SearchMode::random_sampling;
  if (text == "hill-climb") return SearchMode::hill_climb;
  throw InvalidArgument("unknown search mode \"" + text + "\" (exhaustive | random | hill-climb)");
}

void check_spec(const SearchSpec& spec) {
  const auto& d = spec.dims;
  if (d.source_alice == 0 || d.source_bob == 0 || d.alice_local[0] == 0 || d.alice_local[1] == 0 ||
      d.bob_local[0] == 0 || d.bob_local[1] == 0) {
    throw InvalidArgument("search cardinalities must all be >= 1");
  }
  if (spec.budget == 0) throw InvalidArgument("search budget must be >= 1");
  if (spec.max_denominator < 1) throw InvalidArgument("max denominator must be >= 1");
}

namespace {

Rational fast_s_max(const ContextualModel& model) {
  return chsh_from_correlations(detail::dedicated_correlations(model)).s_max;
}

std::size_t table_bits(const Dimensions& d) {
  return d.source_alice * (d.alice_local[0] + d.alice_local[1]) + d.source_bob * (d.bob_local[0] + d.bob_local[1]);
}

// Integer weights w_i with p_i = w_i / den.
struct ScaledPmf {
  std::vector<std::int64_t> weights;
  std::int64_t den = 1;
};

ScaledPmf scale(const std::vector<Rational>& pmf) {
  mpz_class den = 1;
  for (const auto& w : pmf) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), w.denominator().get_mpz_t());
  if (!den.fits_slong_p()) throw InvalidArgument("pmf denominators too large for the enumeration kernel");
  ScaledPmf s;
  s.den = den.get_si();
  for (const auto& w : pmf) {
    const mpz_class v = w.numerator() * (den / w.denominator());
    s.weights.push_back(v.get_si());
  }
  return s;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("common denominator overflows the enumeration kernel");
  return r;
}

struct Candidate {
  std::int64_t s_num = -1;
  std::uint64_t index = 0;
};

struct Chunk {
  Candidate best;
  std::vector<Candidate> trace;
};

// Precomputed per-setting row sums: row_sum[code] = sum_l w_l * sign(bit l of code).
struct SettingKernel {
  std::size_t offset = 0;
  std::size_t local = 0;
  std::size_t rows = 0;
  std::vector<std::int64_t> row_sum;
  std::int64_t den = 1;
};

class TableEnumerator {
 public:
  explicit TableEnumerator(const ContextualModel& m) : model_(m), dims_(model_dimensions(m)) {
    const auto src = [&] {
      std::vector<Rational> flat;
      for (const auto& row : m.source.weights) flat.insert(flat.end(), row.begin(), row.end());
      return scale(flat);
    }();
    rows_ = dims_.source_alice;
    cols_ = dims_.source_bob;
    source_ = src.weights;
    std::size_t offset = 0;
    auto make = [&](const LocalSetting& s, std::size_t rows) {
      SettingKernel k;
      const auto p = scale(s.pmf.weights);
      k.offset = offset;
      k.local = s.pmf.size();
      k.rows = rows;
      k.den = p.den;
      if (k.local >= 31) throw InvalidArgument("local space too large for the enumeration kernel");
      k.row_sum.resize(std::size_t{1} << k.local);
      for (std::size_t code = 0; code < k.row_sum.size(); ++code) {
        std::int64_t sum = 0;
        for (std::size_t l = 0; l < k.local; ++l) sum += ((code >> l) & 1U) ? -p.weights[l] : p.weights[l];
        k.row_sum[code] = sum;
      }
      offset += rows * k.local;
      return k;
    };
    for (std::size_t s = 0; s < 2; ++s) alice_[s] = make(m.alice[s], rows_);
    for (std::size_t s = 0; s < 2; ++s) bob_[s] = make(m.bob[s], cols_);
    bits_ = offset;

    den_ = checked_mul(checked_mul(checked_mul(src.den, alice_[0].den), checked_mul(alice_[1].den, bob_[0].den)),
                       bob_[1].den);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        scale_[2 * a + b] = checked_mul(alice_[1 - a].den, bob_[1 - b].den);
      }
    }
  }

  std::size_t bits() const { return bits_; }
  std::int64_t den() const { return den_; }

  // max over patterns of |sum|, as a numerator over den().
  std::int64_t s_num(std::uint64_t index, std::vector<std::int64_t>& scratch) const {
    scratch.assign(2 * rows_ + 2 * cols_, 0);
    std::int64_t* ma[2] = {scratch.data(), scratch.data() + rows_};
    std::int64_t* mb[2] = {scratch.data() + 2 * rows_, scratch.data() + 2 * rows_ + cols_};
    for (std::size_t s = 0; s < 2; ++s) {
      fill(alice_[s], index, ma[s]);
      fill(bob_[s], index, mb[s]);
    }
    std::int64_t e[4];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        __int128 acc = 0;
        for (std::size_t l1 = 0; l1 < rows_; ++l1) {
          __int128 inner = 0;
          for (std::size_t l2 = 0; l2 < cols_; ++l2) inner += static_cast<__int128>(source_[l1 * cols_ + l2]) * mb[b][l2];
          acc += inner * ma[a][l1];
        }
        e[2 * a + b] = static_cast<std::int64_t>(acc * scale_[2 * a + b]);
      }
    }
    std::int64_t best = 0;
    for (const auto& pattern : chsh_patterns()) {
      std::int64_t s = 0;
      for (int i = 0; i < 4; ++i) s += pattern[static_cast<std::size_t>(i)] * e[i];
      best = std::max(best, s < 0 ? -s : s);
    }
    return best;
  }

  ContextualModel decode(std::uint64_t index) const {
    ContextualModel m = model_;
    auto apply = [&](LocalSetting& s, const SettingKernel& k) {
      for (std::size_t r = 0; r < k.rows; ++r) {
        for (std::size_t l = 0; l < k.local; ++l) {
          s.table.values[r][l] = ((index >> (k.offset + r * k.local + l)) & 1U) ? -1 : 1;
        }
      }
    };
    for (std::size_t s = 0; s < 2; ++s) apply(m.alice[s], alice_[s]);
    for (std::size_t s = 0; s < 2; ++s) apply(m.bob[s], bob_[s]);
    return m;
  }

 private:
  static void fill(const SettingKernel& k, std::uint64_t index, std::int64_t* out) {
    const std::uint64_t mask = (std::uint64_t{1} << k.local) - 1;
    for (std::size_t r = 0; r < k.rows; ++r) out[r] = k.row_sum[(index >> (k.offset + r * k.local)) & mask];
  }

  const ContextualModel& model_;
  Dimensions dims_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> source_;
  SettingKernel alice_[2];
  SettingKernel bob_[2];
  std::size_t bits_ = 0;
  std::int64_t den_ = 1;
  std::int64_t scale_[4] = {1, 1, 1, 1};
};

Chunk scan(const TableEnumerator& en, std::uint64_t lo, std::uint64_t hi) {
  Chunk c;
  std::vector<std::int64_t> scratch;
  for (std::uint64_t i = lo; i < hi; ++i) {
    const auto s = en.s_num(i, scratch);
    if (s > c.best.s_num) {
      c.best = {s, i};
      c.trace.push_back(c.best);
    }
  }
  return c;
}

}  // namespace

std::uint64_t table_assignment_count(const Dimensions& d) {
  const auto bits = table_bits(d);
  if (bits >= 64) return std::numeric_limits<std::uint64_t>::max();
  return std::uint64_t{1} << bits;
}

Rational s_max_of(const ContextualModel& model) {
  require_valid(model);
  return fast_s_max(model);
}

SearchResult enumerate_tables(const ContextualModel& pmf_template, std::uint64_t limit, Exec exec) {
  const TableEnumerator en(pmf_template);
  const auto count = table_assignment_count(model_dimensions(pmf_template));
  if (count > limit) throw SizeExceeded("response-table assignments", count, limit);

  std::vector<Chunk> chunks;
  if (exec == Exec::parallel) {
    const std::uint64_t n_chunks = std::min<std::uint64_t>(count, static_cast<std::uint64_t>(worker_count()) * 16);
    chunks.resize(n_chunks);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
      chunks[c] = scan(en, count * c / n_chunks, count * (c + 1) / n_chunks);
    }
  } else {
    chunks.push_back(scan(en, 0, count));
  }

  // Replaying chunk-local prefix maxima in index order reproduces the
  // serial trace exactly.
  SearchResult result;
  Candidate best;
  std::vector<Candidate> trace;
  for (const auto& c : chunks) {
    for (const auto& t : c.trace) {
      if (t.s_num > best.s_num) {
        best = t;
        trace.push_back(t);
      }
    }
  }
  result.iterations = count;
  result.best_model = en.decode(best.index);
  result.best_s_max = Rational(best.s_num, en.den());
  for (const auto& t : trace) result.trace.push_back({t.index, Rational(t.s_num, en.den())});
  result.spec.dims = model_dimensions(pmf_template);
  result.spec.mode = SearchMode::exhaustive;
  result.spec.budget = count;
  result.spec.enumeration_limit = limit;

  if (fast_s_max(result.best_model) != result.best_s_max) {
    throw Error("enumeration kernel disagrees with the exact engine at assignment " + std::to_string(best.index));
  }
  return result;
}

SearchResult enumerate_deterministic(const SearchSpec& spec, Exec exec) {
  check_spec(spec);
  const auto count = table_assignment_count(spec.dims);
  if (count > spec.enumeration_limit) throw SizeExceeded("response-table assignments", count, spec.enumeration_limit);

  const auto& d = spec.dims;
  ContextualModel t;
  const Rational cell(1, static_cast<long>(d.source_alice * d.source_bob));
  t.source.weights.assign(d.source_alice, std::vector<Rational>(d.source_bob, cell));
  auto setting = [](Side side, const char* label, std::size_t local, std::size_t rows) {
    LocalSetting s;
    s.label = label;
    s.pmf = Pmf::uniform(local);
    s.table = ResponseTable{side, label, std::vector<std::vector<int>>(rows, std::vector<int>(local, 1))};
    return s;
  };
  t.alice = {setting(Side::alice, "x", d.alice_local[0], d.source_alice),
             setting(Side::alice, "x'", d.alice_local[1], d.source_alice)};
  t.bob = {setting(Side::bob, "y", d.bob_local[0], d.source_bob), setting(Side::bob, "y'", d.bob_local[1], d.source_bob)};

  auto result = enumerate_tables(t, spec.enumeration_limit, exec);
  const auto evaluated = result.spec.budget;
  result.spec = spec;
  result.spec.budget = evaluated;
  return result;
}

Pmf random_pmf(std::size_t n, Rng& rng, long max_denominator) {
  const auto den = static_cast<long>(1 + rng.below(static_cast<std::uint64_t>(max_denominator)));
  std::vector<long> cuts;
  cuts.reserve(n + 1);
  cuts.push_back(0);
  for (std::size_t i = 1; i < n; ++i) cuts.push_back(static_cast<long>(rng.below(static_cast<std::uint64_t>(den) + 1)));
  cuts.push_back(den);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  Pmf p;
  for (std::size_t i = 0; i < n; ++i) p.weights.emplace_back(cuts[i + 1] - cuts[i], den);
  return p;
}

ContextualModel random_model(const Dimensions& d, Rng& rng, long max_denominator) {
  ContextualModel m;
  const auto flat = random_pmf(d.source_alice * d.source_bob, rng, max_denominator);
  m.source.weights.resize(d.source_alice);
  for (std::size_t r = 0; r < d.source_alice; ++r) {
    m.source.weights[r].assign(flat.weights.begin() + static_cast<long>(r * d.source_bob),
                               flat.weights.begin() + static_cast<long>((r + 1) * d.source_bob));
  }
  auto setting = [&](Side side, const char* label, std::size_t local, std::size_t rows) {
    LocalSetting s;
    s.label = label;
    s.pmf = random_pmf(local, rng, max_denominator);
    s.table = ResponseTable{side, label, std::vector<std::vector<int>>(rows, std::vector<int>(local))};
    for (auto& row : s.table.values) {
      for (auto& v : row) v = rng.coin() ? 1 : -1;
    }
    return s;
  };
  m.alice.push_back(setting(Side::alice, "x", d.alice_local[0], d.source_alice));
  m.alice.push_back(setting(Side::alice, "x'", d.alice_local[1], d.source_alice));
  m.bob.push_back(setting(Side::bob, "y", d.bob_local[0], d.source_bob));
  m.bob.push_back(setting(Side::bob, "y'", d.bob_local[1], d.source_bob));
  return m;
}

Dimensions random_dimensions(Rng& rng, std::size_t max_cardinality) {
  auto draw = [&] { return static_cast<std::size_t>(1 + rng.below(max_cardinality)); };
  Dimensions d;
  d.source_alice = draw();
  d.source_bob = draw();
  d.alice_local[0] = draw();
  d.alice_local[1] = draw();
  d.bob_local[0] = draw();
  d.bob_local[1] = draw();
  return d;
}

SearchResult random_search(const SearchSpec& spec, Exec exec) {
  check_spec(spec);
  auto sample = [&](std::uint64_t i) {
    Rng rng(derive_seed(spec.seed, i));
    return random_model(spec.dims, rng, spec.max_denominator);
  };
  std::vector<Rational> scores(spec.budget);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
    for (std::uint64_t i = 0; i < spec.budget; ++i) scores[i] = fast_s_max(sample(i));
  } else {
    for (std::uint64_t i = 0; i < spec.budget; ++i) scores[i] = fast_s_max(sample(i));
  }

  SearchResult result;
  result.spec = spec;
  result.iterations = spec.budget;
  std::optional<Rational> running;
  for (std::uint64_t i = 0; i < spec.budget; ++i) {
    if (!running || scores[i] > *running) {
      running = scores[i];
      result.trace.push_back({i, scores[i]});
    }
  }
  result.best_s_max = *running;
  std::optional<std::string> best_text;
  for (std::uint64_t i = 0; i < spec.budget; ++i) {
    if (scores[i] != result.best_s_max) continue;
    auto m = sample(i);
    auto text = serialize_model(m);
    if (!best_text || text < *best_text) {
      best_text = std::move(text);
      result.best_model = std::move(m);
    }
  }
  return result;
}

namespace {

// Applies move `k` of the fixed scan order to `m`. Returns false when k is
// past the last move or the move is a no-op (transfer from an empty point).
struct MoveSpace {
  std::vector<int*> entries;
  std::vector<std::vector<Rational>*> pmfs;
  std::vector<Rational*> source;
};

MoveSpace moves_of(ContextualModel& m) {
  MoveSpace s;
  for (auto* side : {&m.alice, &m.bob}) {
    for (auto& setting : *side) {
      for (auto& row : setting.table.values) {
        for (auto& v : row) s.entries.push_back(&v);
      }
    }
  }
  for (auto& row : m.source.weights) {
    for (auto& w : row) s.source.push_back(&w);
  }
  for (auto* side : {&m.alice, &m.bob}) {
    for (auto& setting : *side) s.pmfs.push_back(&setting.pmf.weights);
  }
  return s;
}

bool transfer(std::vector<Rational*> weights, std::size_t to, std::size_t from, const Rational& step) {
  if (weights[from]->is_zero()) return false;
  const Rational amount = std::min(step, *weights[from]);
  *weights[from] -= amount;
  *weights[to] += amount;
  return true;
}

std::uint64_t move_count(const ContextualModel& m) {
  auto copy = m;
  const auto s = moves_of(copy);
  std::uint64_t n = s.entries.size() + s.source.size() * (s.source.size() - 1);
  for (const auto* p : s.pmfs) n += p->size() * (p->size() - 1);
  return n;
}

bool apply_move(ContextualModel& m, std::uint64_t k, const Rational& step) {
  auto s = moves_of(m);
  if (k < s.entries.size()) {
    *s.entries[k] = -*s.entries[k];
    return true;
  }
  k -= s.entries.size();
  auto pairwise = [&](std::vector<Rational*> weights) -> std::optional<bool> {
    const std::uint64_t n = weights.size();
    const std::uint64_t pairs = n * (n - 1);
    if (k >= pairs) {
      k -= pairs;
      return std::nullopt;
    }
    const std::size_t to = static_cast<std::size_t>(k / (n - 1));
    std::size_t from = static_cast<std::size_t>(k % (n - 1));
    if (from >= to) ++from;
    return transfer(std::move(weights), to, from, step);
  };
  if (auto r = pairwise(s.source)) return *r;
  for (auto* p : s.pmfs) {
    std::vector<Rational*> w;
    for (auto& x : *p) w.push_back(&x);
    if (auto r = pairwise(std::move(w))) return *r;
  }
  return false;
}

}  // namespace

SearchResult hill_climb(const SearchSpec& spec, const std::optional<ContextualModel>& start) {
  check_spec(spec);
  if (start) require_valid(*start);
  const Rational step(1, spec.max_denominator);

  SearchResult result;
  result.spec = spec;
  std::uint64_t evaluations = 0;
  std::uint64_t restart = 0;
  auto record = [&](const ContextualModel& m, const Rational& s) {
    if (evaluations == 1 || s > result.best_s_max) {
      result.best_s_max = s;
      result.best_model = m;
      result.trace.push_back({evaluations - 1, s});
    }
  };

  while (evaluations < spec.budget) {
    ContextualModel current;
    if (restart == 0 && start) {
      current = *start;
    } else {
      Rng rng(derive_seed(spec.seed, restart));
      current = random_model(spec.dims, rng, spec.max_denominator);
    }
    ++restart;
    Rational current_s = fast_s_max(current);
    ++evaluations;
    record(current, current_s);

    const std::uint64_t n_moves = move_count(current);
    bool improved = true;
    while (improved && evaluations < spec.budget) {
      improved = false;
      for (std::uint64_t k = 0; k < n_moves && evaluations < spec.budget; ++k) {
        ContextualModel candidate = current;
        if (!apply_move(candidate, k, step)) continue;
        const Rational s = fast_s_max(candidate);
        ++evaluations;
        record(candidate, s);
        if (s > current_s) {
          current = std::move(candidate);
          current_s = s;
          improved = true;
          break;
        }
      }
    }
  }
  result.iterations = evaluations;
  return result;
}

SearchResult run_search(const SearchSpec& spec, Exec exec) {
  switch (spec.mode) {
    case SearchMode::exhaustive:
      return enumerate_deterministic(spec, exec);
    case SearchMode::random_sampling:
      return random_search(spec, exec);
    case SearchMode::hill_climb:
      return hill_climb(spec);
  }
  throw InvalidArgument("unknown search mode");
}

json search_result_json(const SearchResult& result) {
  const auto cert = certify_lhv_bound(result.best_model);
  auto doc = certificate_json(result.best_model, cert);
  const auto& d = result.spec.dims;
  json trace = json::array();
  for (const auto& t : result.trace) trace.push_back({{"iteration", t.iteration}, {"s_max", t.s_max.str()}});
  doc["search"] = {{"mode", to_string(result.spec.mode)},
                   {"seed", result.spec.seed},
                   {"budget", result.spec.budget},
                   {"iterations", result.iterations},
                   {"rng", result.rng_algorithm},
                   {"max_denominator", result.spec.max_denominator},
                   {"dimensions", {d.source_alice, d.source_bob, d.alice_local[0], d.alice_local[1], d.bob_local[0],
                                   d.bob_local[1]}},
                   {"best_s_max", rational_json(result.best_s_max)},
                   {"trace", trace}};
  doc["best_model"] = model_to_json(result.best_model);
  return doc;
}

}  // namespace bell
