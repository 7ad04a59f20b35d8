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

#ifndef FCELAB_GAME_MODEL_HPP_
#define FCELAB_GAME_MODEL_HPP_

// Finite extensive-form games of perfect recall, pure strategy profiles and
// the combinatorial primitives every regret and equilibrium definition is
// written in: observation, reachability, forced-reach overrides, successor
// infosets, signal histories, deviation plans and the three utilities.
//
// All identifiers are small integers interned in depth-first preorder of the
// tree. Infoset ids are global across players; a player's infosets sorted by
// id are always visited ancestor-first.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcelab/errors.hpp"

namespace fcelab {

using NodeId = int;
using InfosetId = int;
using Player = int;

inline constexpr int kInvalid = -1;
inline constexpr double kChanceSumTolerance = 1e-9;
inline constexpr std::uint64_t kDefaultProfileCap = 1'000'000;

enum class NodeKind { kDecision, kChance, kTerminal };

// ---------------------------------------------------------------------------
// Draft representation: what a parser or builder produces before interning.

struct DraftNode {
  std::string id;
  NodeKind kind = NodeKind::kTerminal;
  Player player = kInvalid;  // 0-based, decision nodes only
  std::string infoset_label;
  std::vector<std::string> actions;
  std::vector<std::string> children;
  std::vector<double> probabilities;  // chance nodes only
  std::vector<double> payoffs;        // terminal nodes only
  int line = 0;
  int column = 0;
};

struct GameDraft {
  std::string name = "game";
  int num_players = 0;
  std::vector<DraftNode> nodes;  // nodes[0] is the root
};

enum class StructureIssue {
  kEmptyGame,
  kDuplicateId,
  kUnknownChild,
  kMultipleParents,
  kOrphan,
  kUnreachable,
  kBadPlayer,
  kNoActions,
  kArityMismatch,
  kInfosetMismatch,
  kBadProbability,
  kProbabilitySum,
  kPayoffArity,
};

std::string_view to_string(StructureIssue issue);

struct StructuralError {
  StructureIssue issue;
  std::string node_id;
  std::string message;
  int line = 0;
  int column = 0;
};

class GameStructureError : public Error {
 public:
  explicit GameStructureError(StructuralError detail)
      : Error(detail.message), detail_(std::move(detail)) {}
  const StructuralError& detail() const { return detail_; }

 private:
  StructuralError detail_;
};

// Every structural problem in the draft, in record order. Empty means the
// draft describes a finite rooted tree with consistent infosets.
std::vector<StructuralError> check_structure(const GameDraft& draft);

// ---------------------------------------------------------------------------
// Interned game tree.

struct AncestryStep {
  InfosetId infoset;
  int action;
  friend bool operator==(const AncestryStep&, const AncestryStep&) = default;
};

struct Node {
  NodeKind kind = NodeKind::kTerminal;
  Player player = kInvalid;
  InfosetId infoset = kInvalid;
  int chance_index = kInvalid;
  NodeId parent = kInvalid;
  int parent_action = kInvalid;
  std::string label;
  std::vector<NodeId> children;
  std::vector<std::string> chance_actions;
  std::vector<double> probabilities;
  std::vector<double> payoffs;
  // Owner's view of the path to this node (decision nodes only).
  std::vector<AncestryStep> ancestry;
};

struct Infoset {
  Player player = kInvalid;
  std::string label;
  std::vector<std::string> actions;
  std::vector<NodeId> nodes;
  // Ancestry of the first member node; unique once perfect recall holds.
  std::vector<AncestryStep> ancestry;
  // successors[a] = Succ(I, a), sorted by id.
  std::vector<std::vector<InfosetId>> successors;
  // DES(I): own infosets weakly below I, sorted by id (I first).
  std::vector<InfosetId> descendants;

  int num_actions() const { return static_cast<int>(actions.size()); }
};

enum class RecallPolicy { kEnforce, kSkip };

class GameTree {
 public:
  // Throws GameStructureError for the first structural problem and, under
  // kEnforce, PerfectRecallError when an infoset's ancestries disagree.
  static GameTree build(const GameDraft& draft,
                        RecallPolicy recall = RecallPolicy::kEnforce);

  const std::string& name() const { return name_; }
  int num_players() const { return num_players_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  int num_chance_nodes() const { return static_cast<int>(chance_nodes_.size()); }
  bool has_chance() const { return !chance_nodes_.empty(); }

  const Node& node(NodeId id) const { return nodes_.at(id); }
  const Infoset& infoset(InfosetId id) const { return infosets_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Infoset>& infosets() const { return infosets_; }
  NodeId root() const { return 0; }
  NodeId chance_node(int chance_index) const { return chance_nodes_.at(chance_index); }
  const std::vector<NodeId>& terminals() const { return terminals_; }

  // Infosets owned by `player`, ancestor-first.
  const std::vector<InfosetId>& player_infosets(Player player) const {
    return player_infosets_.at(player);
  }
  std::optional<InfosetId> find_infoset(Player player, std::string_view label) const;
  std::optional<int> find_action(InfosetId infoset, std::string_view action) const;

  // max - min of the player's terminal payoffs.
  double payoff_range(Player player) const;
  // max - min over all players' terminal payoffs.
  double payoff_range() const;

  void check_infoset(InfosetId infoset) const;
  void check_action(InfosetId infoset, int action) const;

 private:
  std::string name_;
  int num_players_ = 0;
  std::vector<Node> nodes_;
  std::vector<Infoset> infosets_;
  std::vector<NodeId> chance_nodes_;
  std::vector<NodeId> terminals_;
  std::vector<std::vector<InfosetId>> player_infosets_;
};

// ---------------------------------------------------------------------------
// Perfect recall.

struct RecallViolation {
  InfosetId infoset = kInvalid;
  Player player = kInvalid;
  std::string label;
  NodeId first_node = kInvalid;
  NodeId second_node = kInvalid;
  std::vector<AncestryStep> first_ancestry;
  std::vector<AncestryStep> second_ancestry;
};

struct ValidationReport {
  std::vector<StructuralError> structural;
  std::vector<RecallViolation> recall;
  bool ok() const { return structural.empty() && recall.empty(); }
};

ValidationReport validate_perfect_recall(const GameTree& game);
// Reports structural errors (distinct from recall violations) when the draft
// is not a well-formed tree; otherwise builds it and checks recall.
ValidationReport validate_perfect_recall(const GameDraft& draft);

// ---------------------------------------------------------------------------
// Profiles.

struct PureStrategyProfile {
  std::vector<int> choices;  // indexed by InfosetId
  std::vector<int> chance;   // indexed by chance index; empty when abstract
  friend bool operator==(const PureStrategyProfile&, const PureStrategyProfile&) = default;
};

struct SignalHistory {
  InfosetId infoset = kInvalid;
  std::vector<int> actions;
  friend bool operator==(const SignalHistory&, const SignalHistory&) = default;
};

// d(I, history) -> action for every infoset of one player.
class DeviationPlan {
 public:
  explicit DeviationPlan(Player player) : player_(player) {}
  Player player() const { return player_; }
  void set(InfosetId infoset, std::vector<int> history, int action);
  std::optional<int> action(InfosetId infoset, std::span<const int> history) const;
  std::size_t size() const { return plan_.size(); }

 private:
  Player player_;
  std::map<std::pair<InfosetId, std::vector<int>>, int> plan_;
};

// Throws std::invalid_argument unless the profile assigns a valid action to
// every infoset and, when the game has chance nodes and `need_chance`, a valid
// outcome to every chance node.
void check_profile(const GameTree& game, const PureStrategyProfile& s, bool need_chance);

// Sequence of nodes from the root to a terminal under s.
std::vector<NodeId> path_of_play(const GameTree& game, const PureStrategyProfile& s);
std::vector<double> play_out(const GameTree& game, const PureStrategyProfile& s);

bool observed(const GameTree& game, const PureStrategyProfile& s, InfosetId infoset,
              int action);
bool observed_infoset(const GameTree& game, const PureStrategyProfile& s, InfosetId infoset);
bool reachable(const GameTree& game, const PureStrategyProfile& s, InfosetId infoset);

// s with P(I)'s ancestry actions forced and choice(I) = b; s itself when P(I)
// cannot reach I against s.
PureStrategyProfile override_action(const GameTree& game, const PureStrategyProfile& s,
                                    InfosetId infoset, int action);
// s_I: ancestry forced, no override at I.
PureStrategyProfile reach_profile(const GameTree& game, const PureStrategyProfile& s,
                                  InfosetId infoset);

std::optional<InfosetId> next_infoset(const GameTree& game, const PureStrategyProfile& s,
                                      InfosetId infoset, int action);
const std::vector<InfosetId>& successors(const GameTree& game, InfosetId infoset, int action);
const std::vector<InfosetId>& descendants(const GameTree& game, InfosetId infoset);

SignalHistory signal_history(const GameTree& game, const PureStrategyProfile& s,
                             InfosetId infoset);
SignalHistory partial_signal_history(const GameTree& game, const PureStrategyProfile& s,
                                     InfosetId infoset);
// S(I): every realizable full history, lexicographic.
std::vector<SignalHistory> all_signal_histories(const GameTree& game, InfosetId infoset);

// u(I, s1, s2); 0 when P(I) cannot reach I against s2.
double utility_reach(const GameTree& game, InfosetId infoset, const PureStrategyProfile& s1,
                     const PureStrategyProfile& s2);
// u(I, s) = u(I, s, s).
double utility_reach(const GameTree& game, InfosetId infoset, const PureStrategyProfile& s);
// u(I, d, s). Throws std::out_of_range if d is undefined at a pair the play
// actually needs.
double utility_deviation(const GameTree& game, InfosetId infoset, const DeviationPlan& plan,
                         const PureStrategyProfile& s);

// Product of |A(I)| over all infosets, saturating at UINT64_MAX.
std::uint64_t count_pure_profiles(const GameTree& game);
// Lexicographic enumeration of Sigma (infoset 0 most significant). Throws
// CapExceededError when the count exceeds `cap`.
std::vector<PureStrategyProfile> enumerate_pure_profiles(const GameTree& game,
                                                         std::uint64_t cap = kDefaultProfileCap);

struct ChanceOutcome {
  std::vector<int> outcomes;
  double probability = 1.0;
};
// Every full assignment of outcomes to chance nodes, with its probability.
// A game without chance yields one empty outcome of probability 1.
std::vector<ChanceOutcome> enumerate_chance_outcomes(const GameTree& game,
                                                     std::uint64_t cap = kDefaultProfileCap);

}  // namespace fcelab

#endif  // FCELAB_GAME_MODEL_HPP_
