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

#ifndef FCELAB_SRC_WALK_HPP_
#define FCELAB_SRC_WALK_HPP_

// Tree walks over a realized chance assignment. Shared by game_model, the
// learners and the trace audit; none of these read chance probabilities.

#include <span>
#include <vector>

#include "fcelab/game_model.hpp"

namespace fcelab::detail {

inline int chosen_child([[maybe_unused]] const GameTree& game, const Node& node,
                        std::span<const int> choices, std::span<const int> chance) {
  if (node.kind == NodeKind::kChance) return node.children[chance[node.chance_index]];
  return node.children[choices[node.infoset]];
}

// Terminal reached from `from` under `choices` and realized `chance`.
inline NodeId terminal_from(const GameTree& game, NodeId from, std::span<const int> choices,
                            std::span<const int> chance) {
  NodeId id = from;
  while (game.node(id).kind != NodeKind::kTerminal) {
    id = chosen_child(game, game.node(id), choices, chance);
  }
  return id;
}

// Member node of `infoset` on the path from the root, or kInvalid.
inline NodeId node_reached(const GameTree& game, InfosetId infoset,
                           std::span<const int> choices, std::span<const int> chance) {
  NodeId id = game.root();
  while (true) {
    const Node& node = game.node(id);
    if (node.kind == NodeKind::kTerminal) return kInvalid;
    if (node.kind == NodeKind::kDecision && node.infoset == infoset) return id;
    id = chosen_child(game, node, choices, chance);
  }
}

inline void force_ancestry(const GameTree& game, InfosetId infoset, std::vector<int>& choices) {
  for (const AncestryStep& step : game.infoset(infoset).ancestry) {
    choices[step.infoset] = step.action;
  }
}

// Marks every infoset whose node lies on the path of play.
inline void mark_path(const GameTree& game, std::span<const int> choices,
                      std::span<const int> chance, std::vector<char>& on_path) {
  on_path.assign(game.num_infosets(), 0);
  NodeId id = game.root();
  while (game.node(id).kind != NodeKind::kTerminal) {
    const Node& node = game.node(id);
    if (node.kind == NodeKind::kDecision) on_path[node.infoset] = 1;
    id = chosen_child(game, node, choices, chance);
  }
}

inline bool follows_ancestry(const GameTree& game, InfosetId infoset,
                             std::span<const int> choices) {
  for (const AncestryStep& step : game.infoset(infoset).ancestry) {
    if (choices[step.infoset] != step.action) return false;
  }
  return true;
}

// Counterfactual values of one infoset under a realized profile: whether P(I)
// can reach I and, if so, u(I, s|I->b) for every b and u(I, s_I).
struct LocalValues {
  bool reachable = false;
  NodeId node = kInvalid;         // member of I reached with the ancestry forced
  std::vector<double> deviation;  // u(I, s|I->b)
  double baseline = 0.0;          // u(I, s_I)
};

inline LocalValues local_values(const GameTree& game, InfosetId infoset,
                                std::span<const int> choices, std::span<const int> chance,
                                std::vector<int>& scratch) {
  LocalValues out;
  const Infoset& info = game.infoset(infoset);
  scratch.assign(choices.begin(), choices.end());
  force_ancestry(game, infoset, scratch);
  const NodeId at = node_reached(game, infoset, scratch, chance);
  if (at == kInvalid) return out;
  out.reachable = true;
  out.node = at;
  const Node& node = game.node(at);
  const Player player = info.player;
  out.deviation.resize(info.num_actions());
  for (int b = 0; b < info.num_actions(); ++b) {
    const NodeId leaf = terminal_from(game, node.children[b], scratch, chance);
    out.deviation[b] = game.node(leaf).payoffs[player];
  }
  out.baseline = out.deviation[choices[infoset]];
  return out;
}

}  // namespace fcelab::detail

#endif  // FCELAB_SRC_WALK_HPP_
