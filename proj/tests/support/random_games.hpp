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

#ifndef FCELAB_TESTS_SUPPORT_RANDOM_GAMES_HPP_
#define FCELAB_TESTS_SUPPORT_RANDOM_GAMES_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "fcelab/audit.hpp"
#include "fcelab/game_model.hpp"
#include "fcelab/learners.hpp"

namespace fcelab::testing {

struct RandomGameOptions {
  int players = 2;
  int max_infosets = 6;
  int max_actions = 3;
  int max_depth = 4;
  bool chance = false;
  int payoff_lo = -3;
  int payoff_hi = 3;
};

// Random perfect-recall tree. Nodes join an existing infoset only when the
// owner's view of history matches, so recall holds by construction.
GameDraft random_game_draft(std::mt19937_64& rng, const RandomGameOptions& options);
std::shared_ptr<const GameTree> random_game(std::mt19937_64& rng,
                                            const RandomGameOptions& options);

PureStrategyProfile random_profile(const GameTree& game, std::mt19937_64& rng);
// Random strategic choices with a realized chance outcome drawn uniformly.
PureStrategyProfile random_realized_profile(const GameTree& game, std::mt19937_64& rng);
// Trace of `steps` independent random profiles (no learner).
PlayTrace random_trace(std::shared_ptr<const GameTree> game, std::size_t steps,
                       std::mt19937_64& rng);
// Random distribution over at most `support` profiles.
EmpiricalSignal random_signal(const GameTree& game, std::size_t support, std::mt19937_64& rng);

}  // namespace fcelab::testing

#endif  // FCELAB_TESTS_SUPPORT_RANDOM_GAMES_HPP_
