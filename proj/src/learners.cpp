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

#include "fcelab/learners.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fcelab/game_io.hpp"
#include "json.hpp"
#include "walk.hpp"

namespace fcelab {

std::string_view to_string(Procedure procedure) {
  return procedure == Procedure::kFce ? "fce" : "efce";
}

Procedure parse_procedure(std::string_view name) {
  if (name == "fce") return Procedure::kFce;
  if (name == "efce") return Procedure::kEfce;
  throw std::invalid_argument("unknown procedure '" + std::string(name) + "'");
}

std::vector<int> sample_chance(const GameTree& game, CounterRng& rng) {
  std::vector<int> out(game.num_chance_nodes());
  for (int c = 0; c < game.num_chance_nodes(); ++c) {
    const Node& node = game.node(game.chance_node(c));
    const double u = rng.uniform();
    double cumulative = 0.0;
    int pick = static_cast<int>(node.children.size()) - 1;
    for (int k = 0; k < static_cast<int>(node.probabilities.size()); ++k) {
      cumulative += node.probabilities[k];
      if (u < cumulative) {
        pick = k;
        break;
      }
    }
    out[c] = pick;
  }
  return out;
}

namespace {

std::vector<double> player_mu(const GameTree& game, Player player, const LearnerConfig& config) {
  std::vector<double> mu(game.num_infosets(), 0.0);
  const double range = game.payoff_range(player);
  for (InfosetId id : game.player_infosets(player)) {
    mu[id] = config.mu ? *config.mu : default_mu(game.infoset(id).num_actions(), range);
    if (!(mu[id] > 0.0)) throw std::invalid_argument("mu must be positive");
  }
  return mu;
}

std::vector<double> deltas_of(const detail::LocalValues& values) {
  std::vector<double> out(values.deviation.size());
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = values.deviation[b] - values.baseline;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FcePlayer

std::size_t FcePlayer::KeyHash::operator()(const std::tuple<int, int, int>& k) const {
  std::uint64_t h = static_cast<std::uint32_t>(std::get<0>(k));
  h = h * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(std::get<1>(k));
  h = h * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(std::get<2>(k));
  return static_cast<std::size_t>(h ^ (h >> 29));
}

FcePlayer::FcePlayer(std::shared_ptr<const GameTree> game, Player player,
                     const LearnerConfig& config)
    : game_(std::move(game)),
      player_(player),
      config_(config),
      rng_(config.seed, player_stream(player)),
      mu_(player_mu(*game_, player, config)),
      step_context_(game_->num_infosets(), kInvalid) {}

int FcePlayer::intern(int parent_context, int parent_action, InfosetId infoset) {
  const auto key = std::make_tuple(parent_context, parent_action, infoset);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(contexts_.size());
  contexts_.push_back({infoset, InternalRegretRow(game_->infoset(infoset).num_actions())});
  index_.emplace(key, id);
  return id;
}

void FcePlayer::choose(std::vector<int>& choices, bool forced) {
  for (InfosetId id : game_->player_infosets(player_)) {
    const Infoset& info = game_->infoset(id);
    int parent_context = kInvalid;
    int parent_action = kInvalid;
    if (!info.ancestry.empty()) {
      const InfosetId parent = info.ancestry.back().infoset;
      parent_context = step_context_[parent];
      parent_action = choices[parent];
      if (parent_context == kInvalid || parent_action < 0) {
        throw std::logic_error("infoset visited before its ancestors");
      }
    }
    const int context = intern(parent_context, parent_action, id);
    step_context_[id] = context;
    InternalRegretRow& row = contexts_[context].row;
    if (!forced) choices[id] = internal_step(row, mu_[id], rng_);
    row.set_last_action(choices[id]);
  }
}

void FcePlayer::observe(std::span<const int> choices, std::span<const int> chance) {
  for (InfosetId id : game_->player_infosets(player_)) {
    const detail::LocalValues values = detail::local_values(*game_, id, choices, chance, scratch_);
    if (!values.reachable) continue;
    contexts_[step_context_[id]].row.accumulate(choices[id], deltas_of(values));
  }
}

const InternalRegretRow* FcePlayer::find_row(InfosetId infoset,
                                             std::span<const int> partial) const {
  const Infoset& info = game_->infoset(infoset);
  if (info.player != player_ || partial.size() != info.ancestry.size()) return nullptr;
  int context = kInvalid;
  int action = kInvalid;
  for (std::size_t k = 0; k <= info.ancestry.size(); ++k) {
    const InfosetId at = k < info.ancestry.size() ? info.ancestry[k].infoset : infoset;
    auto it = index_.find(std::make_tuple(context, action, at));
    if (it == index_.end()) return nullptr;
    context = it->second;
    if (k < partial.size()) action = partial[k];
  }
  return &contexts_[context].row;
}

double FcePlayer::mu(InfosetId infoset) const { return mu_.at(infoset); }

// ---------------------------------------------------------------------------
// EfcePlayer

EfcePlayer::EfcePlayer(std::shared_ptr<const GameTree> game, Player player,
                       const LearnerConfig& config)
    : game_(std::move(game)),
      player_(player),
      rng_(config.seed, player_stream(player)),
      mu_(player_mu(*game_, player, config)),
      internal_(game_->num_infosets()) {}

int EfcePlayer::choose_on_path(InfosetId infoset, std::optional<int> forced) {
  std::optional<InternalRegretRow>& row = internal_.at(infoset);
  if (!row) row.emplace(game_->infoset(infoset).num_actions());
  if (forced) return *forced;
  return internal_step(*row, mu_[infoset], rng_);
}

InfosetId EfcePlayer::on_path_ancestor(InfosetId infoset, std::span<const char> on_path) const {
  const auto& ancestry = game_->infoset(infoset).ancestry;
  for (auto it = ancestry.rbegin(); it != ancestry.rend(); ++it) {
    if (on_path[it->infoset]) return it->infoset;
  }
  return kInvalid;
}

void EfcePlayer::choose_off_path(std::vector<int>& choices, std::span<const char> on_path,
                                 bool forced) {
  for (InfosetId id : game_->player_infosets(player_)) {
    if (on_path[id]) continue;
    const int n = game_->infoset(id).num_actions();
    const InfosetId ancestor = on_path_ancestor(id, on_path);
    if (ancestor == kInvalid) {
      if (!forced) choices[id] = rng_.uniform_int(n);
      continue;
    }
    auto [it, inserted] =
        external_.try_emplace(std::make_tuple(ancestor, choices[ancestor], id), n);
    if (!forced) choices[id] = external_step(it->second, rng_);
  }
}

void EfcePlayer::observe(std::span<const int> choices, std::span<const int> chance) {
  detail::mark_path(*game_, choices, chance, on_path_);
  for (InfosetId id : game_->player_infosets(player_)) {
    if (on_path_[id]) {
      const detail::LocalValues values =
          detail::local_values(*game_, id, choices, chance, scratch_);
      std::optional<InternalRegretRow>& row = internal_[id];
      if (!row) row.emplace(game_->infoset(id).num_actions());
      row->accumulate(choices[id], deltas_of(values));
      row->set_last_action(choices[id]);
    }
  }
  // External rows hold CFR(I^P, a, I, .) in full: every step with (I^P, a)
  // observed and I reachable counts, whether or not I itself was on path.
  for (InfosetId id : game_->player_infosets(player_)) {
    const auto& ancestry = game_->infoset(id).ancestry;
    bool gated = false;
    for (const AncestryStep& step : ancestry) gated = gated || on_path_[step.infoset];
    if (!gated) continue;
    const detail::LocalValues values = detail::local_values(*game_, id, choices, chance, scratch_);
    if (!values.reachable) continue;
    const std::vector<double> deltas = deltas_of(values);
    for (const AncestryStep& step : ancestry) {
      if (!on_path_[step.infoset]) continue;
      auto [it, inserted] =
          external_.try_emplace(std::make_tuple(step.infoset, choices[step.infoset], id),
                                game_->infoset(id).num_actions());
      it->second.accumulate(deltas);
    }
  }
}

std::size_t EfcePlayer::state_size() const {
  std::size_t size = external_.size();
  for (const auto& row : internal_) {
    if (row) size += static_cast<std::size_t>(row->num_actions());
  }
  return size;
}

std::size_t EfcePlayer::state_bound() const {
  std::size_t bound = 0;
  for (InfosetId id : game_->player_infosets(player_)) {
    const Infoset& info = game_->infoset(id);
    bound += static_cast<std::size_t>(info.num_actions()) * (1 + info.descendants.size());
  }
  return bound;
}

const InternalRegretRow* EfcePlayer::internal_row(InfosetId infoset) const {
  const auto& row = internal_.at(infoset);
  return row ? &*row : nullptr;
}

const ExternalRegretRow* EfcePlayer::external_row(InfosetId ancestor, int action,
                                                  InfosetId infoset) const {
  auto it = external_.find(std::make_tuple(ancestor, action, infoset));
  return it == external_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

class Session {
 public:
  Session(std::shared_ptr<const GameTree> game, const LearnerConfig& config)
      : game_(std::move(game)), config_(config), chance_rng_(config.seed, kChanceStream) {
    for (Player p = 0; p < game_->num_players(); ++p) {
      if (config.procedure == Procedure::kFce) {
        fce_.emplace_back(game_, p, config);
      } else {
        efce_.emplace_back(game_, p, config);
      }
    }
  }

  // Plays one step, or replays `forced` without drawing.
  StepRecord step(const StepRecord* forced) {
    StepRecord rec;
    if (forced) {
      check_profile(*game_, forced->profile, true);
      rec.profile = forced->profile;
    } else {
      rec.profile.choices.assign(game_->num_infosets(), kInvalid);
    }
    std::vector<int>& choices = rec.profile.choices;
    std::vector<int>& chance = rec.profile.chance;
    if (config_.procedure == Procedure::kFce) {
      std::uint64_t rows = 0;
      for (FcePlayer& player : fce_) {
        player.choose(choices, forced != nullptr);
        rows += player.num_contexts();
      }
      if (config_.max_rows != 0 && rows > config_.max_rows) {
        throw MemoryCapError("FCE learner needs " + std::to_string(rows) +
                             " regret contexts, above the cap of " +
                             std::to_string(config_.max_rows) +
                             " (contexts grow by at most one per infoset per step)");
      }
      if (!forced) chance = sample_chance(*game_, chance_rng_);
    } else {
      if (!forced) chance = sample_chance(*game_, chance_rng_);
      std::vector<char> on_path(game_->num_infosets(), 0);
      NodeId id = game_->root();
      while (game_->node(id).kind != NodeKind::kTerminal) {
        const Node& node = game_->node(id);
        if (node.kind == NodeKind::kDecision) {
          std::optional<int> keep;
          if (forced) keep = choices[node.infoset];
          choices[node.infoset] = efce_[node.player].choose_on_path(node.infoset, keep);
          on_path[node.infoset] = 1;
        }
        id = detail::chosen_child(*game_, node, choices, chance);
      }
      for (EfcePlayer& player : efce_) player.choose_off_path(choices, on_path, forced);
    }
    rec.payoffs = game_->node(detail::terminal_from(*game_, game_->root(), choices, chance)).payoffs;
    if (forced && rec.payoffs != forced->payoffs) {
      throw FormatError("trace payoffs do not match the game at a replayed step");
    }
    for (FcePlayer& player : fce_) player.observe(choices, chance);
    for (EfcePlayer& player : efce_) player.observe(choices, chance);
    return rec;
  }

  std::vector<std::uint64_t> counters() const {
    std::vector<std::uint64_t> out = {chance_rng_.counter()};
    for (const FcePlayer& player : fce_) out.push_back(player.rng().counter());
    for (const EfcePlayer& player : efce_) out.push_back(player.rng().counter());
    return out;
  }

  void set_counters(const std::vector<std::uint64_t>& counters) {
    chance_rng_.set_counter(counters[0]);
    for (std::size_t p = 0; p < fce_.size(); ++p) fce_[p].rng().set_counter(counters[p + 1]);
    for (std::size_t p = 0; p < efce_.size(); ++p) efce_[p].rng().set_counter(counters[p + 1]);
  }

 private:
  std::shared_ptr<const GameTree> game_;
  LearnerConfig config_;
  CounterRng chance_rng_;
  std::vector<FcePlayer> fce_;
  std::vector<EfcePlayer> efce_;
};

PlayTrace play(std::shared_ptr<const GameTree> game, std::uint64_t steps,
               const LearnerConfig& config) {
  if (!game) throw std::invalid_argument("null game");
  if (steps < 1) throw std::invalid_argument("step count must be at least 1");
  PlayTrace trace{game, config, {}, {}};
  Session session(game, config);
  trace.steps.reserve(steps);
  for (std::uint64_t t = 0; t < steps; ++t) trace.steps.push_back(session.step(nullptr));
  trace.rng_counters = session.counters();
  return trace;
}

}  // namespace

PlayTrace run_fce(std::shared_ptr<const GameTree> game, std::uint64_t steps,
                  LearnerConfig config) {
  config.procedure = Procedure::kFce;
  return play(std::move(game), steps, config);
}

PlayTrace run_efce(std::shared_ptr<const GameTree> game, std::uint64_t steps,
                   LearnerConfig config) {
  config.procedure = Procedure::kEfce;
  return play(std::move(game), steps, config);
}

PlayTrace run_learner(std::shared_ptr<const GameTree> game, std::uint64_t steps,
                      const LearnerConfig& config) {
  return play(std::move(game), steps, config);
}

PlayTrace resume(const PlayTrace& trace, std::uint64_t extra) {
  if (!trace.game) throw FormatError("trace has no game");
  if (trace.rng_counters.size() != static_cast<std::size_t>(trace.game->num_players()) + 1) {
    throw FormatError("trace has no rng checkpoint");
  }
  PlayTrace out = trace;
  Session session(trace.game, trace.config);
  for (const StepRecord& rec : trace.steps) session.step(&rec);
  session.set_counters(trace.rng_counters);
  out.steps.reserve(trace.steps.size() + extra);
  for (std::uint64_t t = 0; t < extra; ++t) out.steps.push_back(session.step(nullptr));
  out.rng_counters = session.counters();
  return out;
}

// ---------------------------------------------------------------------------
// Trace files

namespace {

constexpr std::string_view kTraceMagic = "fcelab-trace";
constexpr int kTraceVersion = 1;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace(const PlayTrace& trace, std::ostream& out) {
  nlohmann::json config = {
      {"procedure", std::string(to_string(trace.config.procedure))},
      {"seed", trace.config.seed},
      {"max_rows", trace.config.max_rows},
  };
  config["mu"] = trace.config.mu ? nlohmann::json(*trace.config.mu) : nlohmann::json(nullptr);
  out << kTraceMagic << ' ' << kTraceVersion << '\n';
  out << "config " << config.dump() << '\n';
  out << "rng";
  for (std::uint64_t c : trace.rng_counters) out << ' ' << c;
  out << '\n';
  out << "steps " << trace.steps.size() << '\n';
  out << "game-begin\n" << serialize_game(*trace.game) << "game-end\n";
  std::size_t t = 0;
  for (const StepRecord& rec : trace.steps) {
    out << "t " << ++t << " s";
    for (int a : rec.profile.choices) out << ' ' << a;
    out << " c";
    for (int a : rec.profile.chance) out << ' ' << a;
    out << " u";
    for (double v : rec.payoffs) out << ' ' << format_double(v);
    out << '\n';
  }
}

namespace {

[[noreturn]] void bad_trace(std::size_t line, const std::string& what) {
  throw FormatError("trace line " + std::to_string(line) + ": " + what);
}

long long parse_int(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used != token.size()) bad_trace(line, "bad integer '" + token + "'");
    return v;
  } catch (const std::logic_error&) {
    bad_trace(line, "bad integer '" + token + "'");
  }
}

}  // namespace

PlayTrace read_trace(std::istream& in) {
  PlayTrace trace;
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](bool required) {
    if (!std::getline(in, line)) {
      if (required) bad_trace(lineno + 1, "unexpected end of file");
      return false;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
    return true;
  };

  next(true);
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kTraceMagic) bad_trace(lineno, "not a trace file");
    if (version != kTraceVersion) bad_trace(lineno, "unsupported version " + std::to_string(version));
  }

  next(true);
  if (line.rfind("config ", 0) != 0) bad_trace(lineno, "expected config");
  try {
    const nlohmann::json config = nlohmann::json::parse(line.substr(7));
    trace.config.procedure = parse_procedure(config.at("procedure").get<std::string>());
    trace.config.seed = config.at("seed").get<std::uint64_t>();
    trace.config.max_rows = config.value("max_rows", std::uint64_t{0});
    if (config.contains("mu") && !config["mu"].is_null()) trace.config.mu = config["mu"].get<double>();
  } catch (const std::exception& e) {
    bad_trace(lineno, std::string("bad config: ") + e.what());
  }

  next(true);
  {
    std::istringstream rng(line);
    std::string tag, token;
    rng >> tag;
    if (tag != "rng") bad_trace(lineno, "expected rng counters");
    while (rng >> token) {
      const long long c = parse_int(token, lineno);
      if (c < 0) bad_trace(lineno, "negative rng counter");
      trace.rng_counters.push_back(static_cast<std::uint64_t>(c));
    }
  }

  next(true);
  std::size_t expected = 0;
  {
    std::istringstream steps(line);
    std::string tag;
    steps >> tag >> expected;
    if (tag != "steps") bad_trace(lineno, "expected step count");
  }

  next(true);
  if (line != "game-begin") bad_trace(lineno, "expected game-begin");
  std::string text;
  while (next(true) && line != "game-end") text += line + '\n';
  try {
    trace.game = std::make_shared<const GameTree>(parse_game(text));
  } catch (const Error& e) {
    bad_trace(lineno, std::string("embedded game: ") + e.what());
  }
  const GameTree& game = *trace.game;

  trace.steps.reserve(expected);
  while (next(false)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    if (token != "t") bad_trace(lineno, "expected step record");
    row >> token;
    if (parse_int(token, lineno) != static_cast<long long>(trace.steps.size()) + 1) {
      bad_trace(lineno, "steps are not contiguous");
    }
    StepRecord rec;
    row >> token;
    if (token != "s") bad_trace(lineno, "expected profile");
    while (row >> token && token != "c") {
      rec.profile.choices.push_back(static_cast<int>(parse_int(token, lineno)));
    }
    while (row >> token && token != "u") {
      rec.profile.chance.push_back(static_cast<int>(parse_int(token, lineno)));
    }
    while (row >> token) rec.payoffs.push_back(std::strtod(token.c_str(), nullptr));
    try {
      check_profile(game, rec.profile, true);
    } catch (const std::invalid_argument& e) {
      bad_trace(lineno, e.what());
    }
    if (static_cast<int>(rec.payoffs.size()) != game.num_players()) {
      bad_trace(lineno, "payoff arity");
    }
    trace.steps.push_back(std::move(rec));
  }
  if (trace.steps.size() != expected) bad_trace(lineno, "step count mismatch");
  return trace;
}

void save_trace(const PlayTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_trace(trace, out);
  if (!out) throw std::runtime_error("write failed for " + path);
}

PlayTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_trace(in);
}

}  // namespace fcelab
