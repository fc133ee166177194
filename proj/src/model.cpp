#include "bell/model.hpp"

#include <limits>

#include "bell/errors.hpp"

namespace bell {

const char* to_string(Side side) { return side == Side::alice ? "alice" : "bob"; }

InvalidModel::InvalidModel(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid model";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

SizeExceeded::SizeExceeded(const std::string& what, std::uint64_t requested, std::uint64_t limit)
    : Error(what + ": " + std::to_string(requested) + " exceeds limit " + std::to_string(limit)),
      requested_(requested),
      limit_(limit) {}

Pmf Pmf::uniform(std::size_t n) {
  Pmf p;
  p.weights.assign(n, Rational(1, static_cast<long>(n)));
  return p;
}

Pmf Pmf::point() { return Pmf{{Rational(1)}}; }

Pmf JointPmf::alice_marginal() const {
  Pmf p;
  for (const auto& row : weights) {
    Rational s;
    for (const auto& w : row) s += w;
    p.weights.push_back(s);
  }
  return p;
}

Pmf JointPmf::bob_marginal() const {
  Pmf p;
  p.weights.assign(cols(), Rational());
  for (const auto& row : weights) {
    for (std::size_t j = 0; j < row.size() && j < p.size(); ++j) p.weights[j] += row[j];
  }
  return p;
}

ContextIndex resolve(const ContextualModel& model, const Context& ctx) {
  auto find = [](const std::vector<LocalSetting>& side, const std::string& label, const char* who) {
    for (std::size_t i = 0; i < side.size(); ++i) {
      if (side[i].label == label) return static_cast<int>(i);
    }
    throw UnknownSetting(std::string("unknown ") + who + " setting \"" + label + "\"");
  };
  return {find(model.alice, ctx.alice, "alice"), find(model.bob, ctx.bob, "bob")};
}

Context labels(const ContextualModel& model, ContextIndex ctx) {
  return {model.alice.at(static_cast<std::size_t>(ctx.alice)).label,
          model.bob.at(static_cast<std::size_t>(ctx.bob)).label};
}

std::uint64_t Dimensions::unified_size() const {
  const std::size_t factors[6] = {source_alice, source_bob, alice_local[0], alice_local[1], bob_local[0], bob_local[1]};
  std::uint64_t size = 1;
  for (const auto f : factors) {
    if (f != 0 && size > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    size *= f;
  }
  return size;
}

namespace {

void check_weights(const std::vector<Rational>& weights, const std::string& where, Rational& sum,
                   std::vector<std::string>& out) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].sign() < 0) {
      out.push_back(where + "[" + std::to_string(i) + "]: negative weight " + weights[i].str());
    }
    sum += weights[i];
  }
}

void check_side(const std::vector<LocalSetting>& settings, Side side, std::size_t source_size,
                std::vector<std::string>& out) {
  const std::string who = to_string(side);
  if (settings.size() != 2) {
    out.push_back(who + ": expected exactly 2 settings, found " + std::to_string(settings.size()));
  }
  if (settings.size() == 2 && !(settings[0].label < settings[1].label)) {
    out.push_back(who + ": setting labels must be distinct and in ascending order (\"" + settings[0].label +
                  "\", \"" + settings[1].label + "\")");
  }
  for (const auto& s : settings) {
    const std::string where = who + "[" + s.label + "]";
    if (s.label.empty()) out.push_back(who + ": empty setting label");

    if (s.pmf.weights.empty()) {
      out.push_back(where + ".pmf: empty support");
    } else {
      Rational sum;
      check_weights(s.pmf.weights, where + ".pmf", sum, out);
      if (sum != Rational(1)) out.push_back(where + ".pmf: weights sum to " + sum.str() + ", expected 1");
    }

    const auto& t = s.table;
    if (t.side != side) out.push_back(where + ".table: declared for side " + to_string(t.side));
    if (t.setting != s.label) out.push_back(where + ".table: labelled \"" + t.setting + "\"");
    if (t.values.size() != source_size) {
      out.push_back(where + ".table: " + std::to_string(t.values.size()) + " rows, expected " +
                    std::to_string(source_size) + " (source cardinality)");
    }
    for (std::size_t r = 0; r < t.values.size(); ++r) {
      const auto& row = t.values[r];
      const std::string cell = where + ".table[" + std::to_string(r) + "]";
      if (row.size() != s.pmf.size()) {
        out.push_back(cell + ": " + std::to_string(row.size()) + " columns, expected " +
                      std::to_string(s.pmf.size()) + " (local cardinality)");
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c] != 1 && row[c] != -1) {
          out.push_back(cell + "[" + std::to_string(c) + "]: outcome " + std::to_string(row[c]) + " is not +1 or -1");
        }
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate_model(const ContextualModel& model) {
  std::vector<std::string> out;
  const auto& src = model.source.weights;
  if (src.empty() || src.front().empty()) {
    out.push_back("source: empty support");
  } else {
    Rational sum;
    for (std::size_t r = 0; r < src.size(); ++r) {
      if (src[r].size() != src.front().size()) {
        out.push_back("source[" + std::to_string(r) + "]: " + std::to_string(src[r].size()) + " columns, expected " +
                      std::to_string(src.front().size()));
      }
      check_weights(src[r], "source[" + std::to_string(r) + "]", sum, out);
    }
    if (sum != Rational(1)) out.push_back("source: weights sum to " + sum.str() + ", expected 1");
  }
  check_side(model.alice, Side::alice, model.source.rows(), out);
  check_side(model.bob, Side::bob, model.source.cols(), out);
  return out;
}

void require_valid(const ContextualModel& model) {
  auto violations = validate_model(model);
  if (!violations.empty()) throw InvalidModel(std::move(violations));
}

Dimensions model_dimensions(const ContextualModel& model) {
  require_valid(model);
  Dimensions d;
  d.source_alice = model.source.rows();
  d.source_bob = model.source.cols();
  for (int i = 0; i < 2; ++i) {
    d.alice_local[i] = model.alice[static_cast<std::size_t>(i)].pmf.size();
    d.bob_local[i] = model.bob[static_cast<std::size_t>(i)].pmf.size();
  }
  return d;
}

namespace fixtures {

namespace {

LocalSetting setting(Side side, std::string label, Pmf pmf, std::vector<std::vector<int>> table) {
  LocalSetting s;
  s.label = label;
  s.pmf = std::move(pmf);
  s.table = ResponseTable{side, std::move(label), std::move(table)};
  return s;
}

// Index 0 reads as +1, index 1 as -1.
constexpr int kSign[2] = {1, -1};

}  // namespace

ContextualModel m0() {
  ContextualModel m;
  m.source.weights = {{Rational(1)}};
  m.alice = {setting(Side::alice, "x", Pmf::point(), {{1}}), setting(Side::alice, "x'", Pmf::point(), {{1}})};
  m.bob = {setting(Side::bob, "y", Pmf::point(), {{1}}), setting(Side::bob, "y'", Pmf::point(), {{1}})};
  return m;
}

ContextualModel m1() {
  auto m = m0();
  m.alice[1].table.values = {{-1}};
  return m;
}

ContextualModel m2() {
  ContextualModel m;
  m.source.weights = {{Rational(1, 2), Rational(0)}, {Rational(0), Rational(1, 2)}};
  m.alice = {setting(Side::alice, "x", Pmf::point(), {{kSign[0]}, {kSign[1]}}),
             setting(Side::alice, "x'", Pmf::point(), {{1}, {1}})};
  m.bob = {setting(Side::bob, "y", Pmf::point(), {{kSign[0]}, {kSign[1]}}),
           setting(Side::bob, "y'", Pmf::point(), {{-kSign[0]}, {-kSign[1]}})};
  return m;
}

ContextualModel m3() {
  ContextualModel m;
  m.source.weights = {{Rational(1, 2), Rational(0)}, {Rational(0), Rational(1, 2)}};
  m.alice = {setting(Side::alice, "x", Pmf{{Rational(3, 4), Rational(1, 4)}},
                     {{kSign[0], -kSign[0]}, {kSign[1], -kSign[1]}}),
             setting(Side::alice, "x'", Pmf::uniform(2), {{1, 1}, {1, 1}})};
  m.bob = {setting(Side::bob, "y", Pmf::uniform(2), {{kSign[0], kSign[0]}, {kSign[1], kSign[1]}}),
           setting(Side::bob, "y'", Pmf{{Rational(1, 3), Rational(2, 3)}},
                   {{-kSign[0], -kSign[0]}, {-kSign[1], -kSign[1]}})};
  return m;
}

}  // namespace fixtures

}  // namespace bell
