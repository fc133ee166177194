// bell_lab: exact verification and Monte Carlo tooling for contextual
// local-hidden-variable models of CHSH experiments.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bell/cli.hpp"
#include "bell/errors.hpp"

int main(int argc, char** argv) {
  using namespace bell;
  cli::RunConfig cfg;
  std::string format = "json";
  std::string mode = "exhaustive";
  std::string dims;
  std::string bias;
  std::string quantum;

  CLI::App app{"bell_lab - exact CHSH certification and simulation of contextual hidden-variable models"};
  app.require_subcommand(1);

  auto model_opt = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--model", cfg.model_path, "model JSON file");
    if (required) o->required();
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "output file (default stdout)");
    sub->add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  };

  auto* check = app.add_subcommand("check", "validate a model file");
  model_opt(check, true);

  auto* compute = app.add_subcommand("compute", "exact context correlations and CHSH sums");
  model_opt(compute, true);
  common(compute);

  auto* unify = app.add_subcommand("unify", "product-space construction: equivalence and counterfactuals");
  model_opt(unify, true);
  common(unify);
  unify->add_option("--limit", cfg.limit, "product-space cell limit (default 1e7)");

  auto* reduce = app.add_subcommand("reduce", "export the two-uniform reduced model");
  model_opt(reduce, true);
  common(reduce);

  auto* certify = app.add_subcommand("certify", "equivalence + reduction + CHSH bound certificate");
  model_opt(certify, true);
  common(certify);
  certify->add_option("--limit", cfg.limit, "product-space cell limit (default 1e7)");

  auto* search = app.add_subcommand("search", "search response tables and pmfs for the largest CHSH value");
  common(search);
  search->add_option("--mode", mode, "exhaustive | random | hill-climb")
      ->check(CLI::IsMember({"exhaustive", "random", "hill-climb"}));
  search->add_option("--dims", dims, "L1,L2,Lx,Lx',Ly,Ly' cardinalities");
  search->add_option("--seed", cfg.seed, "RNG seed");
  search->add_option("--budget", cfg.budget, "evaluations (random, hill-climb)");
  search->add_option("--limit", cfg.limit, "exhaustive assignment limit (default 2^24)");
  search->add_option("--max-denominator", cfg.max_denominator, "pmf denominator bound");
  search->add_option("--spec", cfg.spec_path, "search spec JSON (overrides flags)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo Bell experiment");
  model_opt(simulate, false);
  common(simulate);
  simulate->add_option("--n", cfg.n, "number of trials");
  simulate->add_option("--seed", cfg.seed, "RNG seed");
  simulate->add_option("--bias", bias, "setting probabilities p(x),p(x'),p(y),p(y')");
  simulate->add_option("--quantum", quantum, "singlet reference at angles a,a',b,b' instead of a model");
  simulate->add_option("--summary", cfg.summary_path, "summary JSON file (default stdout)");
  simulate->add_option("--histogram", cfg.histogram_path, "per-context outcome counts CSV");

  auto* report = app.add_subcommand("report", "summarize a ledger CSV");
  model_opt(report, false);
  common(report);
  report->add_option("--ledger", cfg.ledger_path, "ledger CSV")->required();

  auto* generate = app.add_subcommand("generate", "write a seeded random model");
  common(generate);
  generate->add_option("--dims", dims, "L1,L2,Lx,Lx',Ly,Ly' cardinalities");
  generate->add_option("--seed", cfg.seed, "RNG seed");
  generate->add_option("--max-denominator", cfg.max_denominator, "pmf denominator bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_code::input_error;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.format = cli::parse_format(format);
    cfg.mode = parse_search_mode(mode);
    if (!dims.empty()) cfg.dims = cli::parse_dims(dims);
    if (!bias.empty()) cfg.bias.p = cli::parse_quad(bias);
    if (!quantum.empty()) cfg.quantum = cli::parse_quad(quantum);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code::input_error;
  }
  return cli::run(cfg, std::cout, std::cerr);
}
