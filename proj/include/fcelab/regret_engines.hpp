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

#ifndef FCELAB_REGRET_ENGINES_HPP_
#define FCELAB_REGRET_ENGINES_HPP_

// Action selection from cumulative regrets.
//
// Internal regret matching keeps, per conditioning context, r(a->b): the
// cumulative gain of having played b on the steps where a was played. From the
// last action a it switches to b != a with probability
// max(0, r(a->b)) / (visits * mu) and otherwise repeats a.
//
// External regret matching plays b with probability proportional to
// max(0, r(b)).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fcelab/rng.hpp"

namespace fcelab {

class InternalRegretRow {
 public:
  explicit InternalRegretRow(int num_actions)
      : num_actions_(num_actions),
        regret_(static_cast<std::size_t>(num_actions) * num_actions, 0.0) {}

  int num_actions() const { return num_actions_; }
  double regret(int from, int to) const { return regret_[index(from, to)]; }
  std::uint64_t visits() const { return visits_; }
  std::optional<int> last_action() const { return last_action_; }
  void set_last_action(int action) { last_action_ = action; }

  // r(played->b) += deltas[b] for b != played; visits += 1. Throws
  // std::invalid_argument on arity mismatch. deltas[played] is ignored, so
  // r(a->a) stays 0.
  void accumulate(int played, std::span<const double> deltas);

  friend bool operator==(const InternalRegretRow&, const InternalRegretRow&) = default;

 private:
  std::size_t index(int from, int to) const {
    return static_cast<std::size_t>(from) * num_actions_ + to;
  }

  int num_actions_;
  std::vector<double> regret_;
  std::uint64_t visits_ = 0;
  std::optional<int> last_action_;
};

// Switching distribution from `from`: entry b is the probability of playing b.
std::vector<double> internal_distribution(const InternalRegretRow& row, int from, double mu);

// Samples the next action from the row's last action. Uniform when the row
// has no last action. Consumes exactly one draw. Throws std::invalid_argument
// for mu <= 0.
int internal_step(const InternalRegretRow& row, double mu, CounterRng& rng);

class ExternalRegretRow {
 public:
  explicit ExternalRegretRow(int num_actions) : regret_(num_actions, 0.0) {}

  int num_actions() const { return static_cast<int>(regret_.size()); }
  double regret(int action) const { return regret_[action]; }
  std::uint64_t visits() const { return visits_; }

  void accumulate(std::span<const double> deltas);

  friend bool operator==(const ExternalRegretRow&, const ExternalRegretRow&) = default;

 private:
  std::vector<double> regret_;
  std::uint64_t visits_ = 0;
};

std::vector<double> external_distribution(const ExternalRegretRow& row);

// Consumes exactly one draw.
int external_step(const ExternalRegretRow& row, CounterRng& rng);

// Default normalizer: 2 * |A| * (range of the player's own payoffs).
double default_mu(int num_actions, double payoff_range);

}  // namespace fcelab

#endif  // FCELAB_REGRET_ENGINES_HPP_
