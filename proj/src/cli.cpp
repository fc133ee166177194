#include "bell/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "bell/chsh.hpp"
#include "bell/errors.hpp"
#include "bell/exact_engine.hpp"
#include "bell/model_io.hpp"
#include "bell/uniform_reduction.hpp"
#include "bell/unified_space.hpp"

namespace bell::cli {

using nlohmann::json;

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "text") return OutputFormat::text;
  throw InvalidArgument("unknown format \"" + text + "\" (json | csv | text)");
}

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

void write_text(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << content;
  if (!f) throw Error("write failed: " + path);
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

ContextualModel load(const RunConfig& cfg) {
  if (cfg.model_path.empty()) throw InvalidArgument("--model is required");
  return load_model(cfg.model_path);
}

json equivalence_json(const EquivalenceRecord& rec) {
  json entries = json::array();
  for (const auto& e : rec.entries) {
    entries.push_back({{"alice", e.context.alice},
                       {"bob", e.context.bob},
                       {"dedicated", e.dedicated.str()},
                       {"unified", e.unified.str()},
                       {"factorized", e.factorized.str()}});
  }
  return {{"entries", entries}, {"verdict", rec.equal ? "equal" : "different"}};
}

json reduction_json(const ContextualModel& model, const ReductionRecord& rec) {
  json entries = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto ctx = labels(model, kContexts[i]);
    entries.push_back({{"alice", ctx.alice},
                       {"bob", ctx.bob},
                       {"dedicated", rec.dedicated.values[i].str()},
                       {"reduced", rec.reduced.values[i].str()}});
  }
  return {{"entries", entries},
          {"marginals_preserved", rec.marginals_preserved},
          {"verdict", rec.equal ? "equal" : "different"}};
}

json counterfactuals_json(const CounterfactualSet& c) {
  return {{"alice_pair", rational_json(c.alice_pair)},
          {"bob_pair", rational_json(c.bob_pair)},
          {"all_four", rational_json(c.all_four)}};
}

std::uint64_t cell_limit(const RunConfig& cfg) { return cfg.limit.value_or(kDefaultCellLimit); }

}  // namespace

std::array<double, 4> parse_quad(const std::string& text) {
  const auto parts = split(text);
  if (parts.size() != 4) throw InvalidArgument("expected four comma-separated numbers, got \"" + text + "\"");
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    try {
      std::size_t used = 0;
      out[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: \"" + parts[i] + "\"");
    }
  }
  return out;
}

Dimensions parse_dims(const std::string& text) {
  const auto parts = split(text);
  if (parts.size() != 6) throw InvalidArgument("--dims expects six cardinalities L1,L2,Lx,Lx',Ly,Ly'");
  std::size_t v[6];
  for (std::size_t i = 0; i < 6; ++i) {
    try {
      std::size_t used = 0;
      const auto n = std::stoull(parts[i], &used);
      if (used != parts[i].size() || n == 0) throw std::invalid_argument(parts[i]);
      v[i] = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      throw InvalidArgument("bad cardinality \"" + parts[i] + "\"");
    }
  }
  return Dimensions{v[0], v[1], {v[2], v[3]}, {v[4], v[5]}};
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = load(cfg);
  const auto violations = validate_model(model);
  for (const auto& v : violations) out << v << "\n";
  if (violations.empty()) out << "ok: " << model_hash(model) << "\n";
  return violations.empty() ? exit_code::ok : exit_code::verdict_failure;
}

int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = load(cfg);
  const auto c = correlation_set(model);
  const auto report = chsh_from_correlations(c);
  if (cfg.format == OutputFormat::text) {
    std::ostringstream s;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto ctx = labels(model, kContexts[i]);
      s << "E(" << ctx.alice << "," << ctx.bob << ") = " << c.values[i].str() << "\n";
    }
    s << "s_max = " << report.s_max.str() << " (" << report.s_max.decimal() << ")\n";
    write_text(cfg.out_path, s.str(), out);
  } else {
    write_text(cfg.out_path,
               render({{"correlations", correlations_json(model, c)}, {"chsh", chsh_json(report)},
                       {"model_sha256", model_hash(model)}}),
               out);
  }
  return report.bound_satisfied ? exit_code::ok : exit_code::verdict_failure;
}

int cmd_unify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = load(cfg);
  const auto rec = verify_equivalence(model, cell_limit(cfg));
  const auto u = build_unified(model, cell_limit(cfg));
  const auto cf = counterfactuals(u, Strategy::expanded);
  json doc = {{"model_sha256", model_hash(model)},
              {"unified_size", u.size()},
              {"equivalence", equivalence_json(rec)},
              {"counterfactuals", counterfactuals_json(cf)}};
  write_text(cfg.out_path, render(doc), out);
  return rec.equal ? exit_code::ok : exit_code::verdict_failure;
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = load(cfg);
  write_text(cfg.out_path, render(reduced_model_json(reduce_model(model))), out);
  return exit_code::ok;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load(cfg);
  const auto equivalence = verify_equivalence(model, cell_limit(cfg));
  const auto reduction = verify_reduction(model);
  const auto cert = certify_lhv_bound(model);
  const auto cf = counterfactuals(build_unified(model, cell_limit(cfg)), Strategy::factorized);
  const bool pass = equivalence.equal && reduction.equal && cert.report.bound_satisfied;

  auto doc = certificate_json(model, cert);
  doc["equivalence"] = equivalence_json(equivalence);
  doc["reduction"] = reduction_json(model, reduction);
  doc["counterfactuals"] = counterfactuals_json(cf);
  doc["all_pass"] = pass;

  if (cfg.format == OutputFormat::text) {
    std::ostringstream s;
    s << "model   " << cert.model_hash << "\n";
    for (std::size_t i = 0; i < 4; ++i) {
      const auto ctx = labels(model, kContexts[i]);
      s << "E(" << ctx.alice << "," << ctx.bob << ") = " << cert.correlations.values[i].str() << "\n";
    }
    s << "s_max   " << cert.report.s_max.str() << " (" << cert.report.s_max.decimal() << ")\n";
    s << "equivalence " << (equivalence.equal ? "equal" : "DIFFERENT") << "\n";
    s << "reduction   " << (reduction.equal ? "equal" : "DIFFERENT") << "\n";
    s << "bound       " << (cert.report.bound_satisfied ? "satisfied" : "VIOLATED") << "\n";
    write_text(cfg.out_path, s.str(), out);
  } else {
    write_text(cfg.out_path, render(doc), out);
  }
  if (!cert.report.bound_satisfied) {
    err << "error: CHSH bound violated by a valid local model; the exact engine is defective\n";
  }
  return pass ? exit_code::ok : exit_code::verdict_failure;
}

int cmd_search(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  SearchSpec spec;
  spec.dims = cfg.dims;
  spec.mode = cfg.mode;
  spec.seed = cfg.seed;
  spec.budget = cfg.budget;
  spec.max_denominator = cfg.max_denominator;
  if (cfg.limit) spec.enumeration_limit = *cfg.limit;
  if (!cfg.spec_path.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(cfg.spec_path));
    } catch (const json::exception& e) {
      throw ParseError(std::string("search spec: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      try {
        if (key == "dims") {
          const auto d = value.get<std::vector<std::size_t>>();
          if (d.size() != 6) throw ParseError("search spec: dims needs six entries");
          spec.dims = Dimensions{d[0], d[1], {d[2], d[3]}, {d[4], d[5]}};
        } else if (key == "mode") {
          spec.mode = parse_search_mode(value.get<std::string>());
        } else if (key == "seed") {
          spec.seed = value.get<std::uint64_t>();
        } else if (key == "budget") {
          spec.budget = value.get<std::uint64_t>();
        } else if (key == "limit") {
          spec.enumeration_limit = value.get<std::uint64_t>();
        } else if (key == "max_denominator") {
          spec.max_denominator = value.get<long>();
        } else {
          throw ParseError("search spec: unknown field \"" + key + "\"");
        }
      } catch (const json::exception& e) {
        throw ParseError("search spec field \"" + key + "\": " + e.what());
      }
    }
  }
  const auto result = run_search(spec);
  if (cfg.format == OutputFormat::text) {
    std::ostringstream s;
    s << "mode " << to_string(spec.mode) << ", " << result.iterations << " evaluations\n";
    s << "best s_max " << result.best_s_max.str() << " (" << result.best_s_max.decimal() << ")\n";
    write_text(cfg.out_path, s.str(), out);
  } else {
    write_text(cfg.out_path, render(search_result_json(result)), out);
  }
  return result.best_s_max <= Rational(2) ? exit_code::ok : exit_code::verdict_failure;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  TrialLedger ledger;
  std::optional<ContextualModel> model;
  if (cfg.quantum) {
    ledger = quantum_reference(*cfg.quantum, cfg.n, cfg.seed);
  } else {
    model = load(cfg);
    ledger = simulate_trials(*model, cfg.n, cfg.bias, cfg.seed);
  }
  const bool ledger_to_stdout = cfg.out_path.empty() && cfg.format == OutputFormat::csv;
  if (!cfg.out_path.empty() || ledger_to_stdout) write_text(cfg.out_path, ledger_csv(ledger), out);
  if (!cfg.histogram_path.empty()) write_text(cfg.histogram_path, histogram_csv(ledger), out);
  if (ledger_to_stdout && cfg.summary_path.empty()) return exit_code::ok;

  for (const auto& ctx : kContexts) {
    if (ledger.context_total(ctx) == 0) {
      err << "note: context (" << ledger.alice_labels[static_cast<std::size_t>(ctx.alice)] << ","
          << ledger.bob_labels[static_cast<std::size_t>(ctx.bob)] << ") has no trials; summary skipped\n";
      return exit_code::ok;
    }
  }
  auto summary = summary_json(ledger, model ? &*model : nullptr);
  summary["source"] = cfg.quantum ? json("quantum_reference") : json(model_hash(*model));
  write_text(cfg.summary_path, render(summary), out);
  return exit_code::ok;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.ledger_path.empty()) throw InvalidArgument("--ledger is required");
  const auto ledger = parse_ledger_csv(read_file(cfg.ledger_path));
  std::optional<ContextualModel> model;
  if (!cfg.model_path.empty()) model = load(cfg);
  write_text(cfg.summary_path.empty() ? cfg.out_path : cfg.summary_path,
             render(summary_json(ledger, model ? &*model : nullptr)), out);
  return exit_code::ok;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  Rng rng(cfg.seed);
  const auto model = random_model(cfg.dims, rng, cfg.max_denominator);
  auto doc = model_to_json(model);
  std::ostringstream d;
  d << "random model, seed " << cfg.seed << ", " << kRngAlgorithm;
  doc["description"] = d.str();
  write_text(cfg.out_path, render(doc), out);
  return exit_code::ok;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto& c = cfg.command;
    if (c == "check") return cmd_check(cfg, out, err);
    if (c == "compute") return cmd_compute(cfg, out, err);
    if (c == "unify") return cmd_unify(cfg, out, err);
    if (c == "reduce") return cmd_reduce(cfg, out, err);
    if (c == "certify") return cmd_certify(cfg, out, err);
    if (c == "search") return cmd_search(cfg, out, err);
    if (c == "simulate") return cmd_simulate(cfg, out, err);
    if (c == "report") return cmd_report(cfg, out, err);
    if (c == "generate") return cmd_generate(cfg, out, err);
    err << "error: unknown command \"" << c << "\"\n";
    return exit_code::input_error;
  } catch (const SizeExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::resource_guard;
  } catch (const InvalidModel& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::verdict_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::input_error;
  }
}

}  // namespace bell::cli
