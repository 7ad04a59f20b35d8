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

#include "fcelab/regret_engines.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fcelab {

namespace {

void check_arity(std::size_t got, int want) {
  if (static_cast<int>(got) != want) {
    throw std::invalid_argument("regret delta has " + std::to_string(got) +
                                " entries, row has " + std::to_string(want) + " actions");
  }
}

// Inverse-CDF sample with the last index absorbing rounding slack.
int sample(const std::vector<double>& probs, double u) {
  double cumulative = 0.0;
  for (int b = 0; b < static_cast<int>(probs.size()); ++b) {
    cumulative += probs[b];
    if (u < cumulative) return b;
  }
  for (int b = static_cast<int>(probs.size()) - 1; b >= 0; --b) {
    if (probs[b] > 0.0) return b;
  }
  return 0;
}

}  // namespace

void InternalRegretRow::accumulate(int played, std::span<const double> deltas) {
  check_arity(deltas.size(), num_actions_);
  if (played < 0 || played >= num_actions_) {
    throw std::invalid_argument("played action out of range");
  }
  for (int b = 0; b < num_actions_; ++b) {
    if (b != played) regret_[index(played, b)] += deltas[b];
  }
  ++visits_;
}

std::vector<double> internal_distribution(const InternalRegretRow& row, int from, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  std::vector<double> probs(row.num_actions(), 0.0);
  double switching = 0.0;
  if (row.visits() > 0) {
    const double scale = 1.0 / (static_cast<double>(row.visits()) * mu);
    for (int b = 0; b < row.num_actions(); ++b) {
      if (b == from) continue;
      probs[b] = std::max(0.0, row.regret(from, b)) * scale;
      switching += probs[b];
    }
  }
  if (switching > 1.0) {
    // mu below its precondition; keep a proper distribution.
    for (double& p : probs) p /= switching;
    switching = 1.0;
  }
  probs[from] = 1.0 - switching;
  return probs;
}

int internal_step(const InternalRegretRow& row, double mu, CounterRng& rng) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  const double u = rng.uniform();
  if (!row.last_action()) {
    const int k = static_cast<int>(u * row.num_actions());
    return std::min(k, row.num_actions() - 1);
  }
  return sample(internal_distribution(row, *row.last_action(), mu), u);
}

void ExternalRegretRow::accumulate(std::span<const double> deltas) {
  check_arity(deltas.size(), num_actions());
  for (int b = 0; b < num_actions(); ++b) regret_[b] += deltas[b];
  ++visits_;
}

std::vector<double> external_distribution(const ExternalRegretRow& row) {
  std::vector<double> probs(row.num_actions(), 0.0);
  double total = 0.0;
  for (int b = 0; b < row.num_actions(); ++b) {
    probs[b] = std::max(0.0, row.regret(b));
    total += probs[b];
  }
  if (total <= 0.0) {
    std::fill(probs.begin(), probs.end(), 1.0 / row.num_actions());
    return probs;
  }
  for (double& p : probs) p /= total;
  return probs;
}

int external_step(const ExternalRegretRow& row, CounterRng& rng) {
  return sample(external_distribution(row), rng.uniform());
}

double default_mu(int num_actions, double payoff_range) {
  return 2.0 * num_actions * (payoff_range > 0.0 ? payoff_range : 1.0);
}

}  // namespace fcelab
