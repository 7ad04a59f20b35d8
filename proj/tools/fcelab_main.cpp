// Copyright 2026 The fcelab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fcelab: run a learner, verify a signal, or check the decomposition
// inequalities of a trace.
//
// Exit codes: 0 success, 1 threshold not met or usage error, 2 game or file
// parse/validation failure, 3 profile cap or memory cap exceeded.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fcelab/audit.hpp"
#include "fcelab/game_io.hpp"
#include "fcelab/learners.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fcelab;

namespace {

constexpr int kExitThreshold = 1;
constexpr int kExitParse = 2;
constexpr int kExitCap = 3;

struct RunOptions {
  std::string game = "builtin:matching_pennies";
  std::string procedure = "fce";
  std::uint64_t steps = 1000;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<double> mu;
  std::uint64_t audit_every = 0;
  std::string out = "fcelab-out";
  int jobs = 1;
  std::uint64_t profile_cap = kDefaultProfileCap;
  std::uint64_t max_rows = 0;
};

std::shared_ptr<const GameTree> load_game(const std::string& spec) {
  try {
    return std::make_shared<const GameTree>(resolve_game(spec));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(spec + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::uint64_t> checkpoints(std::uint64_t steps, std::uint64_t every) {
  std::vector<std::uint64_t> out;
  if (every == 0) {
    for (std::uint64_t t = 1; t < steps; t *= 2) out.push_back(t);
  } else {
    for (std::uint64_t t = every; t < steps; t += every) out.push_back(t);
  }
  out.push_back(steps);
  return out;
}

// Writes trace, CSV and summary for one seed into `dir`.
void run_one(const RunOptions& opt, std::shared_ptr<const GameTree> game, std::uint64_t seed,
             const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  LearnerConfig config;
  config.procedure = parse_procedure(opt.procedure);
  config.seed = seed;
  config.mu = opt.mu;
  config.max_rows = opt.max_rows;
  const PlayTrace trace = run_learner(game, opt.steps, config);
  const double learn_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(dir);
  save_trace(trace, (dir / "trace.txt").string());

  std::ofstream csv(dir / "regrets.csv");
  csv << "step,family,key,avg_positive_regret\n";
  csv.precision(17);
  RegretLedger ledger(game);
  std::size_t next = 0;
  const std::vector<std::uint64_t> marks = checkpoints(opt.steps, opt.audit_every);
  for (const StepRecord& step : trace.steps) {
    ledger.add(step);
    if (next < marks.size() && ledger.steps() == marks[next]) {
      ++next;
      for (const RegretEntry& e : ledger.snapshot()) {
        csv << ledger.steps() << ',' << e.family << ',' << describe_key(*game, e.family, e.key)
            << ',' << e.value << '\n';
      }
    }
  }

  const EmpiricalSignal h = empirical_signal(trace);
  const EpsilonReport eps = verify_signal(*game, h, opt.profile_cap);
  const double total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json summary = {
      {"game", game->name()},
      {"procedure", opt.procedure},
      {"seed", seed},
      {"T", opt.steps},
      {"B", game->payoff_range()},
      {"afce_epsilon", eps.afce},
      {"efce_epsilon", eps.efce},
      {"ace_epsilon", eps.ace},
      {"fce_epsilon", eps.fce},
      {"fce_local_epsilon", eps.fce_local},
      {"nesting_violations", eps.nesting_violations()},
      {"max_cfir_plus", ledger.max_cfir_plus()},
      {"max_ar_plus", ledger.max_ar_plus()},
      {"max_successor_cfr_plus", ledger.max_successor_cfr_plus()},
      {"learn_seconds", learn_seconds},
      {"wall_clock_seconds", total_seconds},
  };
  summary["mu"] = opt.mu ? nlohmann::json(*opt.mu) : nlohmann::json("default");
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << std::endl;
}

int cmd_run(RunOptions opt) {
  if (opt.steps < 1) throw CLI::ValidationError("--steps", "must be at least 1");
  if (opt.audit_every != 0 && opt.steps % opt.audit_every != 0) {
    throw CLI::ValidationError("--audit-every", "must divide --steps or be 0");
  }
  parse_procedure(opt.procedure);
  auto game = load_game(opt.game);
  if (opt.seeds.empty()) {
    std::uint64_t seed = 0;
    if (opt.seed) {
      seed = *opt.seed;
    } else if (const char* env = std::getenv("FCELAB_SEED")) {
      seed = std::stoull(env);
    }
    run_one(opt, game, seed, opt.out);
    return 0;
  }

  // Sweep: independent seeds, each in its own subdirectory.
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= opt.seeds.size() || failure) return;
        k = next++;
      }
      try {
        const fs::path dir = fs::path(opt.out) / ("seed-" + std::to_string(opt.seeds[k]));
        run_one(opt, game, opt.seeds[k], dir);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, opt.jobs); ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return 0;
}

int cmd_verify(const std::string& game_spec, const std::string& signal_path, double threshold,
               std::uint64_t cap) {
  auto game = load_game(game_spec);
  const EmpiricalSignal h = parse_signal(*game, read_file(signal_path));
  const EpsilonReport eps = verify_signal(*game, h, cap);
  std::cout << to_json(eps) << std::endl;
  const bool met = eps.afce <= threshold && eps.efce <= threshold && eps.ace <= threshold &&
                   eps.fce <= threshold;
  return met ? 0 : kExitThreshold;
}

int cmd_gapcheck(const std::string& game_spec, const std::string& trace_path,
                 std::uint64_t cap) {
  PlayTrace trace = load_trace(trace_path);
  if (!game_spec.empty()) {
    auto game = load_game(game_spec);
    for (const StepRecord& step : trace.steps) check_profile(*game, step.profile, true);
    trace.game = game;
  }
  const GapReport report = decomposition_gaps(trace, kAuditTolerance, cap);
  std::cout << to_json(*trace.game, report) << std::endl;
  return report.ok() ? 0 : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and certify correlated equilibria of extensive-form games"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a learner and audit its trace");
  run_cmd->add_option("--game", run.game, "Game file or builtin:<name>")->required();
  run_cmd->add_option("--proc", run.procedure, "Learning procedure")
      ->check(CLI::IsMember({"fce", "efce"}));
  run_cmd->add_option("--steps", run.steps, "Number of timesteps T");
  run_cmd->add_option("--seed", run.seed, "Seed (falls back to FCELAB_SEED, then 0)");
  run_cmd->add_option("--seeds", run.seeds, "Seed sweep; one output subdirectory per seed")
      ->delimiter(',');
  run_cmd->add_option("--mu", run.mu, "Internal regret normalizer override")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--audit-every", run.audit_every,
                      "Checkpoint cadence; 0 for powers of 2");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--jobs", run.jobs, "Concurrent seeds in a sweep");
  run_cmd->add_option("--profile-cap", run.profile_cap, "Verifier support cap");
  run_cmd->add_option("--max-rows", run.max_rows, "FCE regret context cap; 0 for none");

  std::string verify_game, signal_path;
  double threshold = kAuditTolerance;
  std::uint64_t verify_cap = kDefaultProfileCap;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Equilibrium gaps of a signal file");
  verify_cmd->add_option("--game", verify_game, "Game file or builtin:<name>")->required();
  verify_cmd->add_option("--signal", signal_path, "Signal file")->required();
  verify_cmd->add_option("--threshold", threshold, "Largest accepted epsilon");
  verify_cmd->add_option("--profile-cap", verify_cap, "Support cap");

  std::string gap_game, trace_path;
  std::uint64_t gap_cap = kDefaultProfileCap;
  CLI::App* gap_cmd = app.add_subcommand("gapcheck", "Decomposition inequalities of a trace");
  gap_cmd->add_option("--trace", trace_path, "Trace file")->required();
  gap_cmd->add_option("--game", gap_game, "Reinterpret the trace against this game");
  gap_cmd->add_option("--profile-cap", gap_cap, "Pure profile cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*verify_cmd) return cmd_verify(verify_game, signal_path, threshold, verify_cap);
    if (*gap_cmd) return cmd_gapcheck(gap_game, trace_path, gap_cap);
  } catch (const ParseError& e) {
    const std::string file = *run_cmd ? run.game : *verify_cmd ? verify_game : gap_game;
    std::cerr << e.diagnostic(file) << std::endl;
    return kExitParse;
  } catch (const FormatError& e) {
    std::cerr << "fcelab: " << e.what() << std::endl;
    return kExitParse;
  } catch (const CapExceededError& e) {
    std::cerr << "fcelab: " << e.what() << std::endl;
    return kExitCap;
  } catch (const MemoryCapError& e) {
    std::cerr << "fcelab: " << e.what() << std::endl;
    return kExitCap;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "fcelab: " << e.what() << std::endl;
    return kExitThreshold;
  } catch (const std::exception& e) {
    std::cerr << "fcelab: " << e.what() << std::endl;
    return kExitThreshold;
  }
  return 0;
}
