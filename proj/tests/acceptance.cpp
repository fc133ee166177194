// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bell/chsh.hpp"
#include "bell/exact_engine.hpp"
#include "bell/experiment_sim.hpp"
#include "bell/model_io.hpp"
#include "bell/strategy_search.hpp"
#include "bell/uniform_reduction.hpp"
#include "bell/unified_space.hpp"

using namespace bell;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kCampaignSeed = 20261014;
constexpr int kModelCount = 1000;

std::vector<ContextualModel> campaign_models() {
  std::vector<ContextualModel> models;
  models.reserve(kModelCount);
  for (int i = 0; i < kModelCount; ++i) {
    Rng rng(derive_seed(kCampaignSeed, static_cast<std::uint64_t>(i)));
    const auto dims = random_dimensions(rng, 4);
    models.push_back(random_model(dims, rng));
  }
  return models;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double target_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome result;
  try {
    result = body();
  } catch (const std::exception& e) {
    result = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (target_seconds > 0 && secs > target_seconds) {
    result.detail += " (over runtime target " + std::to_string(static_cast<int>(target_seconds)) + " s)";
  }
  if (!result.pass) ++failures;
  std::printf("%s criterion %d %-28s %7.2fs  %s\n", result.pass ? "PASS" : "FAIL", id, name.c_str(), secs,
              result.detail.c_str());
  std::fflush(stdout);
}

double exact_double(const Rational& r) { return r.to_double(); }

Outcome monte_carlo(const std::vector<std::pair<std::string, ContextualModel>>& models) {
  constexpr std::uint64_t n = 1'000'000;
  constexpr int seeds = 20;
  std::ostringstream detail;
  bool pass = true;
  for (const auto& [name, model] : models) {
    const auto exact = correlation_set(model);
    int within = 0, quiet = 0;
    for (int s = 0; s < seeds; ++s) {
      const auto ledger = simulate_trials(model, n, SettingBias{}, 1000 + static_cast<std::uint64_t>(s));
      const auto emp = empirical_chsh(ledger);
      bool ok = true;
      for (std::size_t c = 0; c < 4; ++c) {
        const double tol = 3.0 / std::sqrt(static_cast<double>(emp.trials[c]));
        if (std::abs(emp.correlations[c] - exact_double(exact.values[c])) > tol) ok = false;
      }
      within += ok;
      quiet += no_signalling_report(ledger).max_abs_z < 4.0;
    }
    detail << name << ": correlations " << within << "/" << seeds << ", |z|<4 " << quiet << "/" << seeds << "  ";
    pass = pass && within >= 19 && quiet >= 19;
  }
  return {pass, detail.str()};
}

std::string read_bytes(const fs::path& p) { return read_file(p); }

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome reproducibility() {
  const auto dir = fs::temp_directory_path() / ("bell_lab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = BELL_LAB_CLI;
  const std::string models = BELL_LAB_MODELS;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"certify_m3.json", "certify --model " + models + "/m3.json"},
      {"certify_random.json", "certify --model " + models + "/random_seed20261014.json"},
      {"simulate_m2.csv", "simulate --model " + models + "/m2.json --n 200000 --seed 42 --format csv"},
      {"simulate_m3_summary.json", "simulate --model " + models + "/m3.json --n 200000 --seed 42 --out " +
                                       (dir / "ledger_%RUN%.csv").string()},
      {"quantum.csv", "simulate --quantum 0,1.5707963267948966,0.7853981633974483,2.356194490192345 --n 100000 "
                      "--seed 9 --format csv"},
      {"search_exhaustive.json", "search --mode exhaustive --dims 2,2,1,1,1,1"},
      {"search_random.json", "search --mode random --dims 2,2,2,2,2,2 --seed 5 --budget 2000"},
      {"search_hill.json", "search --mode hill-climb --dims 2,2,2,2,2,2 --seed 7 --budget 2000"},
      {"generate.json", "generate --dims 3,3,2,2,2,2 --seed 11"},
  };
  int identical = 0;
  std::string mismatched;
  for (const auto& [file, args] : commands) {
    std::array<std::string, 2> bytes;
    bool ran = true;
    for (int r = 0; r < 2; ++r) {
      std::string a = args;
      if (const auto pos = a.find("%RUN%"); pos != std::string::npos) a.replace(pos, 5, std::to_string(r));
      const auto out = dir / (std::to_string(r) + "_" + file);
      const std::string threads = r == 0 ? "1" : "4";
      ran = ran && shell("BELL_LAB_THREADS=" + threads + " " + cli + " " + a + " > " + out.string() + " 2>/dev/null") == 0;
      bytes[static_cast<std::size_t>(r)] = read_bytes(out);
    }
    bool same = ran && !bytes[0].empty() && bytes[0] == bytes[1];
    if (args.find("%RUN%") != std::string::npos) {
      same = same && read_bytes(dir / "ledger_0.csv") == read_bytes(dir / "ledger_1.csv");
    }
    if (same) {
      ++identical;
    } else {
      mismatched += " " + file;
    }
  }
  fs::remove_all(dir);
  const int total = static_cast<int>(commands.size());
  return {identical == total,
          std::to_string(identical) + "/" + std::to_string(total) + " commands byte-identical across reruns" +
              (mismatched.empty() ? "" : "; differing:" + mismatched)};
}

}  // namespace

int main() {
  const auto models = campaign_models();

  report(1, "equivalence", 60, [&] {
    int equal = 0;
    for (const auto& m : models) equal += verify_equivalence(m).equal;
    return Outcome{equal == kModelCount, std::to_string(equal) + "/" + std::to_string(kModelCount) +
                                             " models with identical dedicated and product-space correlations"};
  });

  report(2, "lhv bound", 120, [&] {
    int bounded = 0;
    for (const auto& m : models) bounded += certify_lhv_bound(m).report.bound_satisfied;
    std::ostringstream detail;
    detail << bounded << "/" << kModelCount << " random models with s_max <= 2; exhaustive maxima:";
    bool exhaustive_ok = true;
    for (const auto& dims : {Dimensions{1, 1, {1, 1}, {1, 1}}, Dimensions{2, 2, {1, 1}, {1, 1}},
                             Dimensions{2, 2, {2, 2}, {2, 2}}}) {
      SearchSpec spec;
      spec.dims = dims;
      spec.enumeration_limit = std::uint64_t{1} << 16;
      const auto result = enumerate_deterministic(spec);
      detail << " " << result.best_s_max.str() << " (" << result.iterations << " tables)";
      exhaustive_ok = exhaustive_ok && result.best_s_max == Rational(2);
    }
    return Outcome{bounded == kModelCount && exhaustive_ok, detail.str()};
  });

  report(3, "reduction preservation", 0, [&] {
    int equal = 0;
    for (const auto& m : models) {
      const auto rec = verify_reduction(m);
      equal += rec.equal && rec.marginals_preserved;
    }
    return Outcome{equal == kModelCount, std::to_string(equal) + "/" + std::to_string(kModelCount) +
                                             " reduced models with identical correlations and marginals"};
  });

  report(4, "exact no-signalling", 0, [&] {
    int holds = 0;
    for (const auto& m : models) holds += exact_no_signalling(m).holds;
    return Outcome{holds == kModelCount, std::to_string(holds) + "/" + std::to_string(kModelCount) +
                                             " models with remote-setting-independent marginals"};
  });

  report(5, "monte carlo consistency", 300, [&] {
    return monte_carlo({{"m2", fixtures::m2()}, {"m3", fixtures::m3()}});
  });

  report(6, "quantum positive control", 0, [&] {
    constexpr double pi = std::numbers::pi;
    const auto ledger = quantum_reference({0.0, pi / 2, pi / 4, 3 * pi / 4}, 1'000'000, 2026);
    const auto emp = empirical_chsh(ledger);
    const double s = emp.s_max;
    const double sigmas = (s - 2.0) / emp.s_max_standard_error;
    std::ostringstream detail;
    detail.precision(6);
    detail << "S = " << s << ", |S - 2 sqrt 2| = " << std::abs(s - 2 * std::numbers::sqrt2) << ", " << sigmas
           << " sigma above 2";
    return Outcome{std::abs(s - 2 * std::numbers::sqrt2) <= 0.01 && sigmas > 5.0, detail.str()};
  });

  report(7, "reproducibility", 0, reproducibility);

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
