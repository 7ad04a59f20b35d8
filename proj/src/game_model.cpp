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

#include "fcelab/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "walk.hpp"

namespace fcelab {

std::string_view to_string(StructureIssue issue) {
  switch (issue) {
    case StructureIssue::kEmptyGame: return "empty-game";
    case StructureIssue::kDuplicateId: return "duplicate-id";
    case StructureIssue::kUnknownChild: return "unknown-child";
    case StructureIssue::kMultipleParents: return "multiple-parents";
    case StructureIssue::kOrphan: return "orphan";
    case StructureIssue::kUnreachable: return "unreachable";
    case StructureIssue::kBadPlayer: return "bad-player";
    case StructureIssue::kNoActions: return "no-actions";
    case StructureIssue::kArityMismatch: return "arity-mismatch";
    case StructureIssue::kInfosetMismatch: return "infoset-mismatch";
    case StructureIssue::kBadProbability: return "bad-probability";
    case StructureIssue::kProbabilitySum: return "probability-sum";
    case StructureIssue::kPayoffArity: return "payoff-arity";
  }
  return "unknown";
}

namespace {

StructuralError make_error(StructureIssue issue, const DraftNode& node, std::string message) {
  return StructuralError{issue, node.id, std::move(message), node.line, node.column};
}

}  // namespace

std::vector<StructuralError> check_structure(const GameDraft& draft) {
  std::vector<StructuralError> errors;
  if (draft.nodes.empty()) {
    errors.push_back({StructureIssue::kEmptyGame, "", "game has no nodes", 0, 0});
    return errors;
  }
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(draft.nodes.size()); ++i) {
    const DraftNode& node = draft.nodes[i];
    if (!index.emplace(node.id, i).second) {
      errors.push_back(make_error(StructureIssue::kDuplicateId, node,
                                  "duplicate node id '" + node.id + "'"));
    }
  }

  std::vector<int> parent_count(draft.nodes.size(), 0);
  // (player, label) -> first node declaring it.
  std::map<std::pair<Player, std::string>, int> infoset_first;
  for (const DraftNode& node : draft.nodes) {
    switch (node.kind) {
      case NodeKind::kTerminal:
        if (static_cast<int>(node.payoffs.size()) != draft.num_players) {
          errors.push_back(make_error(
              StructureIssue::kPayoffArity, node,
              "terminal '" + node.id + "' has " + std::to_string(node.payoffs.size()) +
                  " payoffs, expected " + std::to_string(draft.num_players)));
        }
        break;
      case NodeKind::kDecision: {
        if (node.player < 0 || node.player >= draft.num_players) {
          errors.push_back(make_error(StructureIssue::kBadPlayer, node,
                                      "node '" + node.id + "' has player " +
                                          std::to_string(node.player + 1) + " out of range"));
        }
        if (node.actions.empty()) {
          errors.push_back(
              make_error(StructureIssue::kNoActions, node, "node '" + node.id + "' has no actions"));
        }
        auto key = std::make_pair(node.player, node.infoset_label);
        auto [it, inserted] = infoset_first.emplace(key, static_cast<int>(&node - draft.nodes.data()));
        if (!inserted && draft.nodes[it->second].actions != node.actions) {
          errors.push_back(make_error(StructureIssue::kInfosetMismatch, node,
                                      "infoset '" + node.infoset_label + "' of player " +
                                          std::to_string(node.player + 1) +
                                          " declared with different actions at node '" +
                                          node.id + "'"));
        }
        break;
      }
      case NodeKind::kChance: {
        if (node.actions.empty()) {
          errors.push_back(make_error(StructureIssue::kNoActions, node,
                                      "chance node '" + node.id + "' has no outcomes"));
        }
        double sum = 0.0;
        bool bad = node.probabilities.size() != node.actions.size();
        for (double p : node.probabilities) {
          if (!(p >= 0.0) || !std::isfinite(p)) bad = true;
          sum += p;
        }
        if (bad) {
          errors.push_back(make_error(StructureIssue::kBadProbability, node,
                                      "chance node '" + node.id + "' has an invalid probability"));
        } else if (std::abs(sum - 1.0) > kChanceSumTolerance) {
          errors.push_back(make_error(StructureIssue::kProbabilitySum, node,
                                      "chance node '" + node.id + "' probabilities sum to " +
                                          std::to_string(sum)));
        }
        break;
      }
    }
    if (node.kind != NodeKind::kTerminal && node.children.size() != node.actions.size()) {
      errors.push_back(make_error(StructureIssue::kArityMismatch, node,
                                  "node '" + node.id + "' has mismatched action/child counts"));
    }
    for (const std::string& child : node.children) {
      auto it = index.find(child);
      if (it == index.end()) {
        errors.push_back(make_error(StructureIssue::kUnknownChild, node,
                                    "node '" + node.id + "' references unknown child '" + child +
                                        "'"));
        continue;
      }
      if (++parent_count[it->second] == 2 || it->second == 0) {
        errors.push_back(make_error(StructureIssue::kMultipleParents, draft.nodes[it->second],
                                    "node '" + child + "' has more than one parent"));
      }
    }
  }
  for (std::size_t i = 1; i < draft.nodes.size(); ++i) {
    if (parent_count[i] == 0) {
      errors.push_back(make_error(StructureIssue::kOrphan, draft.nodes[i],
                                  "node '" + draft.nodes[i].id + "' is never referenced"));
    }
  }
  if (!errors.empty()) return errors;

  // With one parent per node the only remaining defect is a detached cycle.
  std::vector<char> seen(draft.nodes.size(), 0);
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    seen[i] = 1;
    for (const std::string& child : draft.nodes[i].children) stack.push_back(index.at(child));
  }
  for (std::size_t i = 0; i < draft.nodes.size(); ++i) {
    if (!seen[i]) {
      errors.push_back(make_error(StructureIssue::kUnreachable, draft.nodes[i],
                                  "node '" + draft.nodes[i].id + "' is not reachable from the root"));
    }
  }
  return errors;
}

GameTree GameTree::build(const GameDraft& draft, RecallPolicy recall) {
  if (auto errors = check_structure(draft); !errors.empty()) {
    throw GameStructureError(errors.front());
  }
  GameTree game;
  game.name_ = draft.name;
  game.num_players_ = draft.num_players;
  game.player_infosets_.resize(draft.num_players);

  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(draft.nodes.size()); ++i) index.emplace(draft.nodes[i].id, i);

  std::map<std::pair<Player, std::string>, InfosetId> infoset_ids;
  std::vector<std::vector<AncestryStep>> own_history(draft.num_players);

  // Preorder interning; recursion depth equals tree depth.
  auto visit = [&](auto&& self, int draft_index, NodeId parent, int parent_action) -> NodeId {
    const DraftNode& src = draft.nodes[draft_index];
    const NodeId id = static_cast<NodeId>(game.nodes_.size());
    game.nodes_.emplace_back();
    {
      Node& node = game.nodes_.back();
      node.kind = src.kind;
      node.parent = parent;
      node.parent_action = parent_action;
      node.label = src.id;
    }
    switch (src.kind) {
      case NodeKind::kTerminal:
        game.nodes_[id].payoffs = src.payoffs;
        game.terminals_.push_back(id);
        return id;
      case NodeKind::kChance:
        game.nodes_[id].chance_index = static_cast<int>(game.chance_nodes_.size());
        game.nodes_[id].chance_actions = src.actions;
        game.nodes_[id].probabilities = src.probabilities;
        game.chance_nodes_.push_back(id);
        break;
      case NodeKind::kDecision: {
        auto key = std::make_pair(src.player, src.infoset_label);
        auto it = infoset_ids.find(key);
        if (it == infoset_ids.end()) {
          const InfosetId iid = static_cast<InfosetId>(game.infosets_.size());
          it = infoset_ids.emplace(key, iid).first;
          Infoset info;
          info.player = src.player;
          info.label = src.infoset_label;
          info.actions = src.actions;
          info.ancestry = own_history[src.player];
          game.infosets_.push_back(std::move(info));
          game.player_infosets_[src.player].push_back(iid);
        }
        Node& node = game.nodes_[id];
        node.player = src.player;
        node.infoset = it->second;
        node.ancestry = own_history[src.player];
        game.infosets_[it->second].nodes.push_back(id);
        break;
      }
    }
    std::vector<NodeId> children;
    children.reserve(src.children.size());
    for (int a = 0; a < static_cast<int>(src.children.size()); ++a) {
      if (src.kind == NodeKind::kDecision) {
        own_history[src.player].push_back({game.nodes_[id].infoset, a});
      }
      children.push_back(self(self, index.at(src.children[a]), id, a));
      if (src.kind == NodeKind::kDecision) own_history[src.player].pop_back();
    }
    game.nodes_[id].children = std::move(children);
    return id;
  };
  visit(visit, 0, kInvalid, kInvalid);

  if (recall == RecallPolicy::kEnforce) {
    ValidationReport report = validate_perfect_recall(game);
    if (!report.recall.empty()) {
      const RecallViolation& v = report.recall.front();
      throw PerfectRecallError("perfect recall violated at infoset '" + v.label + "' of player " +
                               std::to_string(v.player + 1) + " (nodes '" +
                               game.nodes_[v.first_node].label + "' and '" +
                               game.nodes_[v.second_node].label + "')");
    }
  }

  // Succ(I, a): first own nodes below I's members after a, any other moves.
  for (InfosetId iid = 0; iid < game.num_infosets(); ++iid) {
    Infoset& info = game.infosets_[iid];
    info.successors.assign(info.num_actions(), {});
    for (int a = 0; a < info.num_actions(); ++a) {
      std::set<InfosetId> found;
      std::vector<NodeId> stack;
      for (NodeId member : info.nodes) stack.push_back(game.nodes_[member].children[a]);
      while (!stack.empty()) {
        const Node& node = game.nodes_[stack.back()];
        stack.pop_back();
        if (node.kind == NodeKind::kDecision && node.player == info.player) {
          found.insert(node.infoset);
          continue;
        }
        for (NodeId child : node.children) stack.push_back(child);
      }
      info.successors[a].assign(found.begin(), found.end());
    }
  }
  for (InfosetId iid = 0; iid < game.num_infosets(); ++iid) {
    std::set<InfosetId> closure = {iid};
    std::vector<InfosetId> stack = {iid};
    while (!stack.empty()) {
      const InfosetId cur = stack.back();
      stack.pop_back();
      for (const auto& succ : game.infosets_[cur].successors) {
        for (InfosetId next : succ) {
          if (closure.insert(next).second) stack.push_back(next);
        }
      }
    }
    game.infosets_[iid].descendants.assign(closure.begin(), closure.end());
  }
  return game;
}

std::optional<InfosetId> GameTree::find_infoset(Player player, std::string_view label) const {
  if (player < 0 || player >= num_players_) return std::nullopt;
  for (InfosetId iid : player_infosets_[player]) {
    if (infosets_[iid].label == label) return iid;
  }
  return std::nullopt;
}

std::optional<int> GameTree::find_action(InfosetId infoset, std::string_view action) const {
  const auto& actions = infosets_.at(infoset).actions;
  auto it = std::find(actions.begin(), actions.end(), action);
  if (it == actions.end()) return std::nullopt;
  return static_cast<int>(it - actions.begin());
}

double GameTree::payoff_range(Player player) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (NodeId t : terminals_) {
    lo = std::min(lo, nodes_[t].payoffs[player]);
    hi = std::max(hi, nodes_[t].payoffs[player]);
  }
  return terminals_.empty() ? 0.0 : hi - lo;
}

double GameTree::payoff_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (NodeId t : terminals_) {
    for (double v : nodes_[t].payoffs) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return terminals_.empty() ? 0.0 : hi - lo;
}

void GameTree::check_infoset(InfosetId infoset) const {
  if (infoset < 0 || infoset >= num_infosets()) {
    throw std::invalid_argument("unknown infoset id " + std::to_string(infoset));
  }
}

void GameTree::check_action(InfosetId infoset, int action) const {
  check_infoset(infoset);
  if (action < 0 || action >= infosets_[infoset].num_actions()) {
    throw std::invalid_argument("action " + std::to_string(action) + " not in infoset '" +
                                infosets_[infoset].label + "'");
  }
}

ValidationReport validate_perfect_recall(const GameTree& game) {
  ValidationReport report;
  for (InfosetId iid = 0; iid < game.num_infosets(); ++iid) {
    const Infoset& info = game.infoset(iid);
    const NodeId first = info.nodes.front();
    for (NodeId member : info.nodes) {
      if (game.node(member).ancestry != game.node(first).ancestry) {
        report.recall.push_back({iid, info.player, info.label, first, member,
                                 game.node(first).ancestry, game.node(member).ancestry});
        break;
      }
    }
  }
  return report;
}

ValidationReport validate_perfect_recall(const GameDraft& draft) {
  ValidationReport report;
  report.structural = check_structure(draft);
  if (!report.structural.empty()) return report;
  return validate_perfect_recall(GameTree::build(draft, RecallPolicy::kSkip));
}

void DeviationPlan::set(InfosetId infoset, std::vector<int> history, int action) {
  plan_[{infoset, std::move(history)}] = action;
}

std::optional<int> DeviationPlan::action(InfosetId infoset, std::span<const int> history) const {
  auto it = plan_.find({infoset, std::vector<int>(history.begin(), history.end())});
  if (it == plan_.end()) return std::nullopt;
  return it->second;
}

void check_profile(const GameTree& game, const PureStrategyProfile& s, bool need_chance) {
  if (static_cast<int>(s.choices.size()) != game.num_infosets()) {
    throw std::invalid_argument("profile assigns " + std::to_string(s.choices.size()) +
                                " infosets, game has " + std::to_string(game.num_infosets()));
  }
  for (InfosetId iid = 0; iid < game.num_infosets(); ++iid) {
    if (s.choices[iid] < 0 || s.choices[iid] >= game.infoset(iid).num_actions()) {
      throw std::invalid_argument("profile action out of range at infoset '" +
                                  game.infoset(iid).label + "'");
    }
  }
  if (!need_chance || !game.has_chance()) return;
  if (static_cast<int>(s.chance.size()) != game.num_chance_nodes()) {
    throw std::invalid_argument("profile lacks a chance realization");
  }
  for (int c = 0; c < game.num_chance_nodes(); ++c) {
    const int n = static_cast<int>(game.node(game.chance_node(c)).children.size());
    if (s.chance[c] < 0 || s.chance[c] >= n) {
      throw std::invalid_argument("chance outcome out of range");
    }
  }
}

namespace {

void require(const GameTree& game, const PureStrategyProfile& s) { check_profile(game, s, true); }

}  // namespace

std::vector<NodeId> path_of_play(const GameTree& game, const PureStrategyProfile& s) {
  require(game, s);
  std::vector<NodeId> path = {game.root()};
  while (game.node(path.back()).kind != NodeKind::kTerminal) {
    path.push_back(detail::chosen_child(game, game.node(path.back()), s.choices, s.chance));
  }
  return path;
}

std::vector<double> play_out(const GameTree& game, const PureStrategyProfile& s) {
  require(game, s);
  return game.node(detail::terminal_from(game, game.root(), s.choices, s.chance)).payoffs;
}

bool observed(const GameTree& game, const PureStrategyProfile& s, InfosetId infoset,
              int action) {
  game.check_action(infoset, action);
  return s.choices.at(infoset) == action && observed_infoset(game, s, infoset);
}

bool observed_infoset(const GameTree& game, const PureStrategyProfile& s, InfosetId infoset) {
  game.check_infoset(infoset);
  require(game, s);
  return detail::node_reached(game, infoset, s.choices, s.chance) != kInvalid;
}

bool reachable(const GameTree& game, const PureStrategyProfile& s, InfosetId infoset) {
  game.check_infoset(infoset);
  require(game, s);
  std::vector<int> forced = s.choices;
  detail::force_ancestry(game, infoset, forced);
  return detail::node_reached(game, infoset, forced, s.chance) != kInvalid;
}

PureStrategyProfile reach_profile(const GameTree& game, const PureStrategyProfile& s,
                                  InfosetId infoset) {
  if (!reachable(game, s, infoset)) return s;
  PureStrategyProfile out = s;
  detail::force_ancestry(game, infoset, out.choices);
  return out;
}

PureStrategyProfile override_action(const GameTree& game, const PureStrategyProfile& s,
                                    InfosetId infoset, int action) {
  game.check_action(infoset, action);
  if (!reachable(game, s, infoset)) return s;
  PureStrategyProfile out = s;
  detail::force_ancestry(game, infoset, out.choices);
  out.choices[infoset] = action;
  return out;
}

std::optional<InfosetId> next_infoset(const GameTree& game, const PureStrategyProfile& s,
                                      InfosetId infoset, int action) {
  game.check_action(infoset, action);
  if (!reachable(game, s, infoset)) return std::nullopt;
  const PureStrategyProfile deviated = override_action(game, s, infoset, action);
  const NodeId at = detail::node_reached(game, infoset, deviated.choices, deviated.chance);
  const Player owner = game.infoset(infoset).player;
  NodeId id = game.node(at).children[action];
  while (true) {
    const Node& node = game.node(id);
    if (node.kind == NodeKind::kTerminal) return std::nullopt;
    if (node.kind == NodeKind::kDecision && node.player == owner) return node.infoset;
    id = detail::chosen_child(game, node, deviated.choices, deviated.chance);
  }
}

const std::vector<InfosetId>& successors(const GameTree& game, InfosetId infoset, int action) {
  game.check_action(infoset, action);
  return game.infoset(infoset).successors[action];
}

const std::vector<InfosetId>& descendants(const GameTree& game, InfosetId infoset) {
  game.check_infoset(infoset);
  return game.infoset(infoset).descendants;
}

SignalHistory signal_history(const GameTree& game, const PureStrategyProfile& s,
                             InfosetId infoset) {
  SignalHistory out = partial_signal_history(game, s, infoset);
  out.actions.push_back(s.choices.at(infoset));
  return out;
}

SignalHistory partial_signal_history(const GameTree& game, const PureStrategyProfile& s,
                                     InfosetId infoset) {
  game.check_infoset(infoset);
  check_profile(game, s, false);
  SignalHistory out{infoset, {}};
  for (const AncestryStep& step : game.infoset(infoset).ancestry) {
    out.actions.push_back(s.choices[step.infoset]);
  }
  return out;
}

std::vector<SignalHistory> all_signal_histories(const GameTree& game, InfosetId infoset) {
  game.check_infoset(infoset);
  // Sigma is a free product over infosets, so every combination of actions on
  // the ancestry infosets plus I is some S(s, I).
  std::vector<int> arity;
  for (const AncestryStep& step : game.infoset(infoset).ancestry) {
    arity.push_back(game.infoset(step.infoset).num_actions());
  }
  arity.push_back(game.infoset(infoset).num_actions());
  std::vector<SignalHistory> out;
  std::vector<int> digits(arity.size(), 0);
  while (true) {
    out.push_back({infoset, digits});
    int k = static_cast<int>(digits.size()) - 1;
    while (k >= 0 && ++digits[k] == arity[k]) digits[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

double utility_reach(const GameTree& game, InfosetId infoset, const PureStrategyProfile& s1,
                     const PureStrategyProfile& s2) {
  if (!reachable(game, s2, infoset)) return 0.0;
  check_profile(game, s1, false);
  const Player owner = game.infoset(infoset).player;
  std::vector<int> joint = s2.choices;
  for (InfosetId iid : game.player_infosets(owner)) joint[iid] = s1.choices[iid];
  detail::force_ancestry(game, infoset, joint);
  return game.node(detail::terminal_from(game, game.root(), joint, s2.chance)).payoffs[owner];
}

double utility_reach(const GameTree& game, InfosetId infoset, const PureStrategyProfile& s) {
  return utility_reach(game, infoset, s, s);
}

double utility_deviation(const GameTree& game, InfosetId infoset, const DeviationPlan& plan,
                         const PureStrategyProfile& s) {
  const Player owner = game.infoset(infoset).player;
  if (plan.player() != owner) {
    throw std::invalid_argument("deviation plan belongs to another player");
  }
  if (!reachable(game, s, infoset)) return play_out(game, s)[owner];
  std::vector<int> forced = s.choices;
  detail::force_ancestry(game, infoset, forced);
  NodeId id = detail::node_reached(game, infoset, forced, s.chance);
  while (true) {
    const Node& node = game.node(id);
    if (node.kind == NodeKind::kTerminal) return node.payoffs[owner];
    if (node.kind == NodeKind::kDecision && node.player == owner) {
      const SignalHistory history = signal_history(game, s, node.infoset);
      const std::optional<int> a = plan.action(node.infoset, history.actions);
      if (!a || *a < 0 || *a >= game.infoset(node.infoset).num_actions()) {
        throw std::out_of_range("deviation plan undefined at infoset '" +
                                game.infoset(node.infoset).label + "'");
      }
      id = node.children[*a];
      continue;
    }
    id = detail::chosen_child(game, node, forced, s.chance);
  }
}

std::uint64_t count_pure_profiles(const GameTree& game) {
  std::uint64_t count = 1;
  for (const Infoset& info : game.infosets()) {
    const auto n = static_cast<std::uint64_t>(info.num_actions());
    if (count > std::numeric_limits<std::uint64_t>::max() / n) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= n;
  }
  return count;
}

std::vector<PureStrategyProfile> enumerate_pure_profiles(const GameTree& game,
                                                         std::uint64_t cap) {
  const std::uint64_t count = count_pure_profiles(game);
  if (count > cap) {
    throw CapExceededError("game too large for exhaustive oracle: " + std::to_string(count) +
                           " pure profiles exceed cap " + std::to_string(cap));
  }
  std::vector<PureStrategyProfile> out;
  out.reserve(count);
  std::vector<int> digits(game.num_infosets(), 0);
  while (true) {
    out.push_back({digits, {}});
    int k = game.num_infosets() - 1;
    while (k >= 0 && ++digits[k] == game.infoset(k).num_actions()) digits[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<ChanceOutcome> enumerate_chance_outcomes(const GameTree& game, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (int c = 0; c < game.num_chance_nodes(); ++c) {
    count *= game.node(game.chance_node(c)).children.size();
    if (count > cap) throw CapExceededError("too many chance outcomes for exhaustive oracle");
  }
  std::vector<ChanceOutcome> out;
  std::vector<int> digits(game.num_chance_nodes(), 0);
  while (true) {
    double p = 1.0;
    for (int c = 0; c < game.num_chance_nodes(); ++c) {
      p *= game.node(game.chance_node(c)).probabilities[digits[c]];
    }
    out.push_back({digits, p});
    int k = game.num_chance_nodes() - 1;
    while (k >= 0 &&
           ++digits[k] == static_cast<int>(game.node(game.chance_node(k)).children.size())) {
      digits[k--] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

}  // namespace fcelab
