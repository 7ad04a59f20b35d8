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

#ifndef FCELAB_LEARNERS_HPP_
#define FCELAB_LEARNERS_HPP_

// Repeated play of an extensive-form game by uncoupled regret learners.
//
// FcePlayer keeps one internal regret matrix per (infoset, partial signal
// history); row a of that matrix is the counterfactual internal regret of the
// full history ending in a. Every step the player walks all of its infosets
// ancestor-first and picks an action from the matrix, starting from the
// action last played under the same partial history.
//
// EfcePlayer keeps one internal regret matrix per infoset, driven by agent
// regrets on the path of play, and one external regret row per
// (on-path ancestor, its action, off-path infoset).
//
// Players only ever read their own payoffs. Chance outcomes are sampled by
// the driver and handed to players already realized.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "fcelab/errors.hpp"
#include "fcelab/game_model.hpp"
#include "fcelab/regret_engines.hpp"
#include "fcelab/rng.hpp"

namespace fcelab {

enum class Procedure { kFce, kEfce };

std::string_view to_string(Procedure procedure);
Procedure parse_procedure(std::string_view name);

struct LearnerConfig {
  Procedure procedure = Procedure::kFce;
  std::uint64_t seed = 0;
  // Overrides the per-infoset default_mu when set.
  std::optional<double> mu;
  // Upper bound on FCE regret contexts summed over players; 0 means no cap.
  std::uint64_t max_rows = 0;
  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

// Stream ids: chance draws from stream 0, player p from stream p + 1.
inline constexpr std::uint64_t kChanceStream = 0;
inline std::uint64_t player_stream(Player player) { return static_cast<std::uint64_t>(player) + 1; }

struct StepRecord {
  PureStrategyProfile profile;  // complete choices plus realized chance
  std::vector<double> payoffs;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct PlayTrace {
  std::shared_ptr<const GameTree> game;
  LearnerConfig config;
  std::vector<StepRecord> steps;  // steps[t - 1] is timestep t
  // Draw counters after the last step: chance first, then players in order.
  std::vector<std::uint64_t> rng_counters;

  std::size_t horizon() const { return steps.size(); }
};

// Samples one outcome at every chance node, one draw per node in chance
// index order. This is the environment, not a player.
std::vector<int> sample_chance(const GameTree& game, CounterRng& rng);

class FcePlayer {
 public:
  FcePlayer(std::shared_ptr<const GameTree> game, Player player, const LearnerConfig& config);

  Player player() const { return player_; }

  // Writes an action for every infoset of this player into `choices`. With
  // `forced`, keeps the actions already in `choices` and draws nothing; state
  // still advances as if they had been chosen.
  void choose(std::vector<int>& choices, bool forced = false);

  // Accumulates counterfactual internal regrets for the step just played.
  // `choices` must be the profile whose own part came from choose().
  void observe(std::span<const int> choices, std::span<const int> chance);

  std::size_t num_contexts() const { return contexts_.size(); }
  // Regret matrix for (infoset, partial signal history), if ever visited.
  const InternalRegretRow* find_row(InfosetId infoset, std::span<const int> partial) const;
  double mu(InfosetId infoset) const;

  CounterRng& rng() { return rng_; }
  const CounterRng& rng() const { return rng_; }

 private:
  struct Context {
    InfosetId infoset;
    InternalRegretRow row;
  };
  struct KeyHash {
    std::size_t operator()(const std::tuple<int, int, int>& k) const;
  };

  int intern(int parent_context, int parent_action, InfosetId infoset);

  std::shared_ptr<const GameTree> game_;
  Player player_;
  LearnerConfig config_;
  CounterRng rng_;
  std::vector<double> mu_;  // indexed by InfosetId, own infosets only
  std::vector<Context> contexts_;
  std::unordered_map<std::tuple<int, int, int>, int, KeyHash> index_;
  std::vector<int> step_context_;  // per InfosetId, context used this step
  std::vector<int> scratch_;
};

class EfcePlayer {
 public:
  EfcePlayer(std::shared_ptr<const GameTree> game, Player player, const LearnerConfig& config);

  Player player() const { return player_; }

  // Part 1: action at an infoset on the path of play. One draw unless forced.
  int choose_on_path(InfosetId infoset, std::optional<int> forced = std::nullopt);

  // Part 2: actions at every own infoset with on_path[I] == 0, written into
  // `choices`. Own on-path choices must already be in `choices`.
  void choose_off_path(std::vector<int>& choices, std::span<const char> on_path,
                       bool forced = false);

  void observe(std::span<const int> choices, std::span<const int> chance);

  // Allocated (infoset, action) internal rows plus external rows.
  std::size_t state_size() const;
  // Bound on state_size(): sum |A(I)| + sum over I^P of |A(I^P)| * |DES(I^P)|.
  std::size_t state_bound() const;

  const InternalRegretRow* internal_row(InfosetId infoset) const;
  const ExternalRegretRow* external_row(InfosetId ancestor, int action, InfosetId infoset) const;

  CounterRng& rng() { return rng_; }
  const CounterRng& rng() const { return rng_; }

 private:
  // Closest own ancestor of `infoset` marked on path, or kInvalid.
  InfosetId on_path_ancestor(InfosetId infoset, std::span<const char> on_path) const;

  std::shared_ptr<const GameTree> game_;
  Player player_;
  CounterRng rng_;
  std::vector<double> mu_;
  std::vector<std::optional<InternalRegretRow>> internal_;  // by InfosetId
  std::map<std::tuple<InfosetId, int, InfosetId>, ExternalRegretRow> external_;
  std::vector<char> on_path_;
  std::vector<int> scratch_;
};

// Plays T steps from scratch. Throws MemoryCapError when the FCE context
// count exceeds config.max_rows.
PlayTrace run_fce(std::shared_ptr<const GameTree> game, std::uint64_t steps,
                  LearnerConfig config);
PlayTrace run_efce(std::shared_ptr<const GameTree> game, std::uint64_t steps,
                   LearnerConfig config);
// Dispatches on config.procedure.
PlayTrace run_learner(std::shared_ptr<const GameTree> game, std::uint64_t steps,
                      const LearnerConfig& config);

// Extends a trace by `extra` steps, bit-identical to an uninterrupted run.
// Throws FormatError when the trace lacks its rng checkpoint.
PlayTrace resume(const PlayTrace& trace, std::uint64_t extra);

// Line-oriented trace format, version 1.
void write_trace(const PlayTrace& trace, std::ostream& out);
PlayTrace read_trace(std::istream& in);
void save_trace(const PlayTrace& trace, const std::string& path);
PlayTrace load_trace(const std::string& path);

}  // namespace fcelab

#endif  // FCELAB_LEARNERS_HPP_
