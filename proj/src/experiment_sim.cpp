#include "bell/experiment_sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <omp.h>

#include "bell/errors.hpp"
#include "bell/exact_engine.hpp"
#include "bell/model_io.hpp"
#include "bell/rng.hpp"
#include "bell/uniform_reduction.hpp"

namespace bell {

using nlohmann::json;

void check_bias(const SettingBias& bias) {
  for (const double p : bias.p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("setting probabilities must be positive");
  }
  if (std::abs(bias.p[0] + bias.p[1] - 1.0) > 1e-12 || std::abs(bias.p[2] + bias.p[3] - 1.0) > 1e-12) {
    throw InvalidArgument("setting probabilities must sum to 1 on each side");
  }
}

std::uint64_t TrialLedger::context_total(ContextIndex ctx) const {
  const auto& c = counts[static_cast<std::size_t>(2 * ctx.alice + ctx.bob)];
  return c[0] + c[1] + c[2] + c[3];
}

void TrialLedger::tally() {
  counts = {};
  for (const auto& r : records) ++counts[2U * r.alice_setting + r.bob_setting][outcome_bin(r.a, r.b)];
}

bool TrialLedger::counts_consistent() const {
  TrialLedger copy;
  copy.records = records;
  copy.tally();
  return copy.counts == counts;
}

namespace {

// Shared driver: generates trials in fixed-size shards, each shard with its
// own derived stream, writing records at their trial index.
template <typename Trial>
TrialLedger run_sharded(std::uint64_t n, std::uint64_t seed, Exec exec, Trial&& trial) {
  if (n == 0) throw InvalidArgument("trial count must be >= 1");
  TrialLedger ledger;
  ledger.seed = seed;
  ledger.records.resize(n);
  const std::uint64_t shards = (n + kShardSize - 1) / kShardSize;
  auto run_shard = [&](std::uint64_t s) {
    Rng rng(derive_seed(seed, s));
    const std::uint64_t end = std::min(n, (s + 1) * kShardSize);
    for (std::uint64_t t = s * kShardSize; t < end; ++t) {
      auto& r = ledger.records[t];
      r.trial = t;
      trial(rng, r);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::uint64_t s = 0; s < shards; ++s) run_shard(s);
  } else {
    for (std::uint64_t s = 0; s < shards; ++s) run_shard(s);
  }
  ledger.tally();
  return ledger;
}

std::uint64_t bias_threshold(double p) {
  return static_cast<std::uint64_t>(std::ldexp(p, static_cast<int>(kUniformBits)));
}

}  // namespace

TrialLedger simulate_trials(const ContextualModel& model, std::uint64_t n, const SettingBias& bias, std::uint64_t seed,
                            Exec exec) {
  check_bias(bias);
  const auto reduced = reduce_model(model);

  // Inverse transform for the source pair over the row-major flattening.
  std::vector<std::uint64_t> source_thresholds;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> source_cells;
  Rational cumulative;
  for (std::size_t l1 = 0; l1 < model.source.rows(); ++l1) {
    for (std::size_t l2 = 0; l2 < model.source.cols(); ++l2) {
      if (model.source(l1, l2).is_zero()) continue;
      cumulative += model.source(l1, l2);
      source_thresholds.push_back(cumulative.dyadic_floor(kUniformBits));
      source_cells.emplace_back(static_cast<std::uint32_t>(l1), static_cast<std::uint32_t>(l2));
    }
  }
  const std::uint64_t alice_cut = bias_threshold(bias.p[0]);
  const std::uint64_t bob_cut = bias_threshold(bias.p[2]);

  auto ledger = run_sharded(n, seed, exec, [&](Rng& rng, TrialRecord& r) {
    r.alice_setting = rng.uniform53() < alice_cut ? 0 : 1;
    r.bob_setting = rng.uniform53() < bob_cut ? 0 : 1;
    const auto k = rng.uniform53();
    auto it = std::lower_bound(source_thresholds.begin(), source_thresholds.end(), k);
    if (it == source_thresholds.end()) --it;
    const auto [l1, l2] = source_cells[static_cast<std::size_t>(it - source_thresholds.begin())];
    const auto cell_a = reduced.alice.cell_at(rng.uniform53());
    const auto cell_b = reduced.bob.cell_at(rng.uniform53());
    const auto& sa = model.alice[r.alice_setting];
    const auto& sb = model.bob[r.bob_setting];
    r.a = static_cast<std::int8_t>(sa.table(l1, reduced.alice.local_value(cell_a, r.alice_setting)));
    r.b = static_cast<std::int8_t>(sb.table(l2, reduced.bob.local_value(cell_b, r.bob_setting)));
  });
  ledger.alice_labels = {model.alice[0].label, model.alice[1].label};
  ledger.bob_labels = {model.bob[0].label, model.bob[1].label};
  return ledger;
}

TrialLedger quantum_reference(const std::array<double, 4>& angles, std::uint64_t n, std::uint64_t seed, Exec exec) {
  // Cumulative P(++), P(+-), P(-+) per context.
  std::array<std::array<double, 3>, 4> cdf{};
  for (std::size_t c = 0; c < 4; ++c) {
    const double cosine = std::cos(angles[c / 2] - angles[2 + c % 2]);
    const double same = (1.0 - cosine) / 4.0;
    const double diff = (1.0 + cosine) / 4.0;
    cdf[c] = {same, same + diff, same + 2.0 * diff};
  }
  return run_sharded(n, seed, exec, [&](Rng& rng, TrialRecord& r) {
    r.alice_setting = rng.coin() ? 1 : 0;
    r.bob_setting = rng.coin() ? 1 : 0;
    const double u = rng.uniform01();
    const auto& f = cdf[2U * r.alice_setting + r.bob_setting];
    const std::size_t bin = u < f[0] ? 0 : (u < f[1] ? 1 : (u < f[2] ? 2 : 3));
    r.a = bin < 2 ? 1 : -1;
    r.b = bin % 2 == 0 ? 1 : -1;
  });
}

EmpiricalChsh empirical_chsh(const TrialLedger& ledger) {
  EmpiricalChsh out;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& k = ledger.counts[c];
    const std::uint64_t total = k[0] + k[1] + k[2] + k[3];
    if (total == 0) {
      throw InvalidArgument("context (" + ledger.alice_labels[c / 2] + "," + ledger.bob_labels[c % 2] +
                            ") has no trials");
    }
    const double e = (static_cast<double>(k[0] + k[3]) - static_cast<double>(k[1] + k[2])) / static_cast<double>(total);
    out.trials[c] = total;
    out.correlations[c] = e;
    out.standard_errors[c] = std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(total));
  }
  for (std::size_t p = 0; p < 8; ++p) {
    auto& s = out.sums[p];
    s.signs = chsh_patterns()[p];
    double var = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      s.value += s.signs[i] * out.correlations[i];
      var += out.standard_errors[i] * out.standard_errors[i];
    }
    s.standard_error = std::sqrt(var);
    if (std::abs(s.value) > out.s_max) {
      out.s_max = std::abs(s.value);
      out.s_max_standard_error = s.standard_error;
    }
  }
  if (out.s_max == 0) out.s_max_standard_error = out.sums[0].standard_error;
  return out;
}

NoSignallingReport no_signalling_report(const TrialLedger& ledger) {
  for (std::size_t c = 0; c < 4; ++c) {
    if (ledger.context_total(kContexts[c]) == 0) {
      throw InvalidArgument("context (" + ledger.alice_labels[c / 2] + "," + ledger.bob_labels[c % 2] +
                            ") has no trials");
    }
  }
  NoSignallingReport report;
  for (const Side side : {Side::alice, Side::bob}) {
    for (int setting = 0; setting < 2; ++setting) {
      for (const int outcome : {1, -1}) {
        NoSignallingEntry e;
        e.side = side;
        e.setting = setting;
        e.outcome = outcome;
        std::array<std::uint64_t, 2> hits{};
        for (int remote = 0; remote < 2; ++remote) {
          const int a_set = side == Side::alice ? setting : remote;
          const int b_set = side == Side::alice ? remote : setting;
          const auto& k = ledger.counts[static_cast<std::size_t>(2 * a_set + b_set)];
          const auto r = static_cast<std::size_t>(remote);
          e.trials[r] = k[0] + k[1] + k[2] + k[3];
          if (side == Side::alice) {
            hits[r] = outcome > 0 ? k[0] + k[1] : k[2] + k[3];
          } else {
            hits[r] = outcome > 0 ? k[0] + k[2] : k[1] + k[3];
          }
          e.frequencies[r] = static_cast<double>(hits[r]) / static_cast<double>(e.trials[r]);
        }
        e.difference = e.frequencies[0] - e.frequencies[1];
        const double pooled = static_cast<double>(hits[0] + hits[1]) / static_cast<double>(e.trials[0] + e.trials[1]);
        e.standard_error = std::sqrt(pooled * (1.0 - pooled) *
                                     (1.0 / static_cast<double>(e.trials[0]) + 1.0 / static_cast<double>(e.trials[1])));
        e.z = e.standard_error > 0 ? e.difference / e.standard_error : 0.0;
        report.max_abs_z = std::max(report.max_abs_z, std::abs(e.z));
        report.entries.push_back(e);
      }
    }
  }
  return report;
}

std::array<Rational, 4> exact_outcome_distribution(const ContextualModel& model, ContextIndex ctx) {
  require_valid(model);
  const auto& a = model.alice[static_cast<std::size_t>(ctx.alice)];
  const auto& b = model.bob[static_cast<std::size_t>(ctx.bob)];
  std::array<Rational, 4> p;
  for (std::size_t l1 = 0; l1 < model.source.rows(); ++l1) {
    for (std::size_t l2 = 0; l2 < model.source.cols(); ++l2) {
      const Rational& w = model.source(l1, l2);
      if (w.is_zero()) continue;
      for (std::size_t la = 0; la < a.pmf.size(); ++la) {
        for (std::size_t lb = 0; lb < b.pmf.size(); ++lb) {
          p[outcome_bin(a.table(l1, la), b.table(l2, lb))] += w * a.pmf[la] * b.pmf[lb];
        }
      }
    }
  }
  return p;
}

ExactNoSignalling exact_no_signalling(const ContextualModel& model) {
  std::array<std::array<Rational, 4>, 4> joint;
  for (std::size_t c = 0; c < 4; ++c) joint[c] = exact_outcome_distribution(model, kContexts[c]);
  ExactNoSignalling out;
  out.holds = true;
  for (const Side side : {Side::alice, Side::bob}) {
    for (int setting = 0; setting < 2; ++setting) {
      ExactMarginalCheck check;
      check.side = side;
      check.setting = setting;
      for (int remote = 0; remote < 2; ++remote) {
        const int a_set = side == Side::alice ? setting : remote;
        const int b_set = side == Side::alice ? remote : setting;
        const auto& p = joint[static_cast<std::size_t>(2 * a_set + b_set)];
        check.p_plus[static_cast<std::size_t>(remote)] = side == Side::alice ? p[0] + p[1] : p[0] + p[2];
      }
      out.holds = out.holds && check.p_plus[0] == check.p_plus[1];
      out.checks.push_back(check);
    }
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("ledger line " + std::to_string(line_no) + ": unterminated quote");
  return fields;
}

const char* outcome_text(int v) { return v > 0 ? "+1" : "-1"; }

int parse_outcome(const std::string& s, std::size_t line_no) {
  if (s == "+1" || s == "1") return 1;
  if (s == "-1") return -1;
  throw ParseError("ledger line " + std::to_string(line_no) + ": outcome \"" + s + "\" is not +1 or -1");
}

}  // namespace

std::string ledger_csv(const TrialLedger& ledger) {
  std::string out = "trial,alice_setting,bob_setting,a,b\n";
  out.reserve(out.size() + ledger.records.size() * 20);
  const std::array<std::string, 2> alice{csv_field(ledger.alice_labels[0]), csv_field(ledger.alice_labels[1])};
  const std::array<std::string, 2> bob{csv_field(ledger.bob_labels[0]), csv_field(ledger.bob_labels[1])};
  for (const auto& r : ledger.records) {
    out += std::to_string(r.trial);
    out += ',';
    out += alice[r.alice_setting];
    out += ',';
    out += bob[r.bob_setting];
    out += ',';
    out += outcome_text(r.a);
    out += ',';
    out += outcome_text(r.b);
    out += '\n';
  }
  return out;
}

TrialLedger parse_ledger_csv(std::string_view text) {
  struct Row {
    std::uint64_t trial;
    std::string alice, bob;
    int a, b;
  };
  std::vector<Row> rows;
  std::set<std::string> alice_labels, bob_labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "trial,alice_setting,bob_setting,a,b") throw ParseError("ledger: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    auto f = split_csv_line(line, line_no);
    if (f.size() != 5) throw ParseError("ledger line " + std::to_string(line_no) + ": expected 5 fields");
    Row r;
    try {
      std::size_t used = 0;
      r.trial = std::stoull(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("ledger line " + std::to_string(line_no) + ": bad trial index");
    }
    r.alice = f[1];
    r.bob = f[2];
    r.a = parse_outcome(f[3], line_no);
    r.b = parse_outcome(f[4], line_no);
    alice_labels.insert(r.alice);
    bob_labels.insert(r.bob);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw ParseError("ledger: empty input");
  if (alice_labels.size() > 2 || bob_labels.size() > 2) throw ParseError("ledger: more than two settings on a side");

  TrialLedger ledger;
  auto assign = [](const std::set<std::string>& seen, std::array<std::string, 2>& out) {
    std::size_t i = 0;
    for (const auto& s : seen) out[i++] = s;
  };
  if (!alice_labels.empty()) assign(alice_labels, ledger.alice_labels);
  if (!bob_labels.empty()) assign(bob_labels, ledger.bob_labels);
  for (const auto& r : rows) {
    TrialRecord rec;
    rec.trial = r.trial;
    rec.alice_setting = r.alice == ledger.alice_labels[0] ? 0 : 1;
    rec.bob_setting = r.bob == ledger.bob_labels[0] ? 0 : 1;
    rec.a = static_cast<std::int8_t>(r.a);
    rec.b = static_cast<std::int8_t>(r.b);
    ledger.records.push_back(rec);
  }
  ledger.tally();
  return ledger;
}

std::string histogram_csv(const TrialLedger& ledger) {
  std::ostringstream out;
  out << "alice_setting,bob_setting,a,b,count\n";
  for (std::size_t c = 0; c < 4; ++c) {
    for (const int a : {1, -1}) {
      for (const int b : {1, -1}) {
        out << csv_field(ledger.alice_labels[c / 2]) << ',' << csv_field(ledger.bob_labels[c % 2]) << ','
            << outcome_text(a) << ',' << outcome_text(b) << ',' << ledger.counts[c][outcome_bin(a, b)] << '\n';
      }
    }
  }
  return out.str();
}

json summary_json(const TrialLedger& ledger, const ContextualModel* model) {
  const auto chsh = empirical_chsh(ledger);
  const auto ns = no_signalling_report(ledger);
  json contexts = json::array();
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& k = ledger.counts[c];
    contexts.push_back({{"alice", ledger.alice_labels[c / 2]},
                        {"bob", ledger.bob_labels[c % 2]},
                        {"trials", chsh.trials[c]},
                        {"counts", {{"++", k[0]}, {"+-", k[1]}, {"-+", k[2]}, {"--", k[3]}}},
                        {"correlation", chsh.correlations[c]},
                        {"standard_error", chsh.standard_errors[c]}});
  }
  json sums = json::array();
  for (const auto& s : chsh.sums) {
    sums.push_back({{"signs", s.signs}, {"sum", s.value}, {"standard_error", s.standard_error}});
  }
  json table = json::array();
  for (const auto& e : ns.entries) {
    const auto& own = e.side == Side::alice ? ledger.alice_labels : ledger.bob_labels;
    const auto& remote = e.side == Side::alice ? ledger.bob_labels : ledger.alice_labels;
    table.push_back({{"side", to_string(e.side)},
                     {"setting", own[static_cast<std::size_t>(e.setting)]},
                     {"outcome", e.outcome},
                     {"remote", remote},
                     {"trials", e.trials},
                     {"frequencies", e.frequencies},
                     {"difference", e.difference},
                     {"standard_error", e.standard_error},
                     {"z", e.z}});
  }
  json doc = {{"trials", ledger.records.size()},
              {"rng", kRngAlgorithm},
              {"contexts", contexts},
              {"chsh",
               {{"sums", sums},
                {"s_max", chsh.s_max},
                {"s_max_standard_error", chsh.s_max_standard_error},
                {"sigmas_above_2",
                 chsh.s_max_standard_error > 0 ? (chsh.s_max - 2.0) / chsh.s_max_standard_error : 0.0}}},
              {"no_signalling", {{"entries", table}, {"max_abs_z", ns.max_abs_z}}}};
  doc["seed"] = ledger.seed ? json(*ledger.seed) : json(nullptr);
  if (model != nullptr) {
    const auto exact = correlation_set(*model);
    doc["exact"] = {{"correlations", correlations_json(*model, exact)},
                    {"s_max", rational_json(chsh_from_correlations(exact).s_max)}};
  }
  return doc;
}

}  // namespace bell
