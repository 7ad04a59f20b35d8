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

#include "fcelab/audit.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fcelab/game_io.hpp"
#include "json.hpp"
#include "walk.hpp"

namespace fcelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One weighted realized profile: a trace step (weight 1) or a support
// profile of h paired with one chance outcome (weight h(s) * p(c)).
struct Item {
  std::span<const int> choices;
  std::span<const int> chance;
  double weight;
};

struct Arrival {
  NodeId node;
  std::size_t item;
};

using Buckets = std::map<InfosetId, std::vector<Arrival>>;

// Backward induction for one player against a fixed set of items.
class Solver {
 public:
  Solver(const GameTree& game, Player player, const std::vector<Item>& items)
      : game_(game), player_(player), items_(items) {}

  // Weighted payoff of terminals reached from `from` before the player moves
  // again; arrivals at the player's next decision nodes go to `out`.
  double advance(NodeId from, std::size_t item, Buckets& out) const {
    const Item& it = items_[item];
    NodeId id = from;
    while (true) {
      const Node& node = game_.node(id);
      if (node.kind == NodeKind::kTerminal) return it.weight * node.payoffs[player_];
      if (node.kind == NodeKind::kDecision && node.player == player_) {
        out[node.infoset].push_back({id, item});
        return 0.0;
      }
      id = detail::chosen_child(game_, node, it.choices, it.chance);
    }
  }

  // Value of playing b at every arrival, then continuing optimally.
  double branch(const std::vector<Arrival>& arrivals, int b, bool with_history) const {
    Buckets next;
    double value = 0.0;
    for (const Arrival& arr : arrivals) {
      value += advance(game_.node(arr.node).children[b], arr.item, next);
    }
    for (const auto& [infoset, list] : next) {
      value += with_history ? best_with_history(infoset, list) : best_blind(infoset, list);
    }
    return value;
  }

  double best_action(InfosetId infoset, const std::vector<Arrival>& arrivals,
                     bool with_history, int excluded = kInvalid) const {
    double best = kNegInf;
    for (int b = 0; b < game_.infoset(infoset).num_actions(); ++b) {
      if (b == excluded) continue;
      best = std::max(best, branch(arrivals, b, with_history));
    }
    return best;
  }

  // One action per infoset, no further recommendations seen.
  double best_blind(InfosetId infoset, const std::vector<Arrival>& arrivals) const {
    return best_action(infoset, arrivals, false);
  }

  // One action per (infoset, signal history): arrivals split by the
  // recommendations along the infoset's ancestry and at the infoset.
  double best_with_history(InfosetId infoset, const std::vector<Arrival>& arrivals) const {
    std::map<std::vector<int>, std::vector<Arrival>> groups;
    for (const Arrival& arr : arrivals) groups[history(infoset, arr.item)].push_back(arr);
    double value = 0.0;
    for (const auto& [key, group] : groups) value += best_action(infoset, group, true);
    return value;
  }

  std::vector<int> history(InfosetId infoset, std::size_t item) const {
    std::vector<int> out;
    const Infoset& info = game_.infoset(infoset);
    out.reserve(info.ancestry.size() + 1);
    for (const AncestryStep& step : info.ancestry) out.push_back(items_[item].choices[step.infoset]);
    out.push_back(items_[item].choices[infoset]);
    return out;
  }

 private:
  const GameTree& game_;
  Player player_;
  const std::vector<Item>& items_;
};

std::vector<Item> trace_items(const PlayTrace& trace) {
  if (!trace.game) throw std::invalid_argument("trace has no game");
  std::vector<Item> items;
  items.reserve(trace.steps.size());
  for (const StepRecord& step : trace.steps) {
    items.push_back({step.profile.choices, step.profile.chance, 1.0});
  }
  return items;
}

// Holds the chance outcomes the signal items point into.
struct SignalItems {
  std::vector<ChanceOutcome> outcomes;
  std::vector<Item> items;
};

SignalItems signal_items(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  check_signal(game, h, 1e-6);
  SignalItems out;
  out.outcomes = enumerate_chance_outcomes(game, cap);
  const std::uint64_t size = h.size() * out.outcomes.size();
  if (size > cap) {
    throw CapExceededError("signal support of " + std::to_string(h.size()) + " profiles times " +
                           std::to_string(out.outcomes.size()) +
                           " chance outcomes exceeds cap " + std::to_string(cap));
  }
  out.items.reserve(size);
  for (const auto& [choices, weight] : h) {
    if (weight == 0.0) continue;
    for (const ChanceOutcome& c : out.outcomes) {
      out.items.push_back({choices, c.outcomes, weight * c.probability});
    }
  }
  return out;
}

bool on_path(const GameTree& game, InfosetId infoset, const Item& item) {
  return detail::node_reached(game, infoset, item.choices, item.chance) != kInvalid;
}

double average(double sum, std::size_t horizon) {
  return horizon == 0 ? 0.0 : sum / static_cast<double>(horizon);
}

// sum_t gate * delta_b, per b.
std::vector<double> gated_deltas(const GameTree& game, const std::vector<Item>& items,
                                 InfosetId ancestor, int action, InfosetId infoset) {
  std::vector<double> sums(game.infoset(infoset).num_actions(), 0.0);
  std::vector<int> scratch;
  for (const Item& item : items) {
    if (item.choices[ancestor] != action || !on_path(game, ancestor, item)) continue;
    const detail::LocalValues v = detail::local_values(game, infoset, item.choices, item.chance, scratch);
    if (!v.reachable) continue;
    for (std::size_t b = 0; b < sums.size(); ++b) {
      sums[b] += item.weight * (v.deviation[b] - v.baseline);
    }
  }
  return sums;
}

double max_or_zero(const std::vector<double>& values) {
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  return best;
}

// Arrivals at I gated by O(s, I^P, a) * R(s, I), with their summed baseline.
struct Gathered {
  std::vector<Arrival> arrivals;
  double baseline = 0.0;
};

Gathered gather(const GameTree& game, const std::vector<Item>& items, InfosetId ancestor,
                int action, InfosetId infoset) {
  Gathered out;
  std::vector<int> scratch;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const Item& item = items[k];
    if (item.choices[ancestor] != action || !on_path(game, ancestor, item)) continue;
    const detail::LocalValues v = detail::local_values(game, infoset, item.choices, item.chance, scratch);
    if (!v.reachable) continue;
    out.arrivals.push_back({v.node, k});
    out.baseline += item.weight * v.baseline;
  }
  return out;
}

double external_value(const GameTree& game, const std::vector<Item>& items, InfosetId ancestor,
                      int action, InfosetId infoset) {
  const Gathered g = gather(game, items, ancestor, action, infoset);
  if (g.arrivals.empty()) return 0.0;
  Solver solver(game, game.infoset(infoset).player, items);
  return solver.best_blind(infoset, g.arrivals) - g.baseline;
}

double internal_value(const GameTree& game, const std::vector<Item>& items, InfosetId infoset,
                      int action) {
  if (game.infoset(infoset).num_actions() < 2) return 0.0;
  const Gathered g = gather(game, items, infoset, action, infoset);
  if (g.arrivals.empty()) return 0.0;
  Solver solver(game, game.infoset(infoset).player, items);
  return solver.best_action(infoset, g.arrivals, false, action) - g.baseline;
}

}  // namespace

// ---------------------------------------------------------------------------

EmpiricalSignal empirical_signal(const PlayTrace& trace) {
  if (trace.steps.empty()) throw std::invalid_argument("empty trace");
  EmpiricalSignal h;
  const double w = 1.0 / static_cast<double>(trace.steps.size());
  for (const StepRecord& step : trace.steps) h[step.profile.choices] += w;
  return h;
}

void check_signal(const GameTree& game, const EmpiricalSignal& h, double tolerance) {
  if (h.empty()) throw std::invalid_argument("empty signal");
  double total = 0.0;
  for (const auto& [choices, weight] : h) {
    if (!(weight >= 0.0)) throw std::invalid_argument("negative signal weight");
    check_profile(game, {choices, {}}, false);
    total += weight;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw std::invalid_argument("signal weights sum to " + std::to_string(total) + ", not 1");
  }
}

namespace {

[[noreturn]] void bad_signal(int line, const std::string& what) {
  throw FormatError("signal line " + std::to_string(line) + ": " + what);
}

InfosetId lookup_infoset(const GameTree& game, std::string_view name, int line) {
  const auto colon = name.find(':');
  if (colon != std::string_view::npos) {
    int player = 0;
    const std::string_view digits = name.substr(0, colon);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), player);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || player < 1 ||
        player > game.num_players()) {
      bad_signal(line, "bad player in '" + std::string(name) + "'");
    }
    const auto id = game.find_infoset(player - 1, name.substr(colon + 1));
    if (!id) bad_signal(line, "unknown infoset '" + std::string(name) + "'");
    return *id;
  }
  InfosetId found = kInvalid;
  for (Player p = 0; p < game.num_players(); ++p) {
    const auto id = game.find_infoset(p, name);
    if (!id) continue;
    if (found != kInvalid) {
      bad_signal(line, "infoset label '" + std::string(name) +
                           "' is shared by several players; write <player>:<label>");
    }
    found = *id;
  }
  if (found == kInvalid) bad_signal(line, "unknown infoset '" + std::string(name) + "'");
  return found;
}

}  // namespace

EmpiricalSignal parse_signal(const GameTree& game, std::string_view text) {
  EmpiricalSignal h;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  double total = 0.0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    std::string token;
    if (!(line >> token)) continue;
    if (token != "weight") bad_signal(lineno, "expected 'weight'");
    if (!(line >> token)) bad_signal(lineno, "missing weight");
    const std::optional<double> weight = parse_game_number(token);
    if (!weight || *weight < 0.0) bad_signal(lineno, "bad weight '" + token + "'");
    if (!(line >> token) || token != "profile") bad_signal(lineno, "expected 'profile'");
    std::vector<int> choices(game.num_infosets(), kInvalid);
    while (line >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) bad_signal(lineno, "expected <infoset>=<action>, got '" + token + "'");
      const InfosetId id = lookup_infoset(game, std::string_view(token).substr(0, eq), lineno);
      const auto action = game.find_action(id, std::string_view(token).substr(eq + 1));
      if (!action) bad_signal(lineno, "unknown action in '" + token + "'");
      if (choices[id] != kInvalid) bad_signal(lineno, "infoset assigned twice in '" + token + "'");
      choices[id] = *action;
    }
    for (InfosetId id = 0; id < game.num_infosets(); ++id) {
      if (choices[id] == kInvalid) {
        bad_signal(lineno, "no action for infoset '" + game.infoset(id).label + "' of player " +
                               std::to_string(game.infoset(id).player + 1));
      }
    }
    h[choices] += *weight;
    total += *weight;
  }
  if (h.empty()) throw FormatError("signal has no profiles");
  if (std::abs(total - 1.0) > 1e-6) {
    throw FormatError("signal weights sum to " + std::to_string(total) + ", not 1");
  }
  return h;
}

std::string format_signal(const GameTree& game, const EmpiricalSignal& h) {
  std::string out;
  char buf[32];
  for (const auto& [choices, weight] : h) {
    std::snprintf(buf, sizeof buf, "%.17g", weight);
    out += "weight ";
    out += buf;
    out += " profile";
    for (InfosetId id = 0; id < game.num_infosets(); ++id) {
      const Infoset& info = game.infoset(id);
      out += " " + std::to_string(info.player + 1) + ":" + info.label + "=" +
             info.actions.at(choices.at(id));
    }
    out += "\n";
  }
  return out;
}

void check_descendant(const GameTree& game, InfosetId ancestor, InfosetId infoset) {
  game.check_infoset(ancestor);
  game.check_infoset(infoset);
  const auto& des = game.infoset(ancestor).descendants;
  if (game.infoset(ancestor).player != game.infoset(infoset).player ||
      !std::binary_search(des.begin(), des.end(), infoset)) {
    throw std::invalid_argument("infoset is not an own descendant of the ancestor infoset");
  }
}

double counterfactual_regret(const PlayTrace& trace, InfosetId ancestor, int action,
                             InfosetId infoset, int deviation) {
  const GameTree& game = *trace.game;
  check_descendant(game, ancestor, infoset);
  game.check_action(ancestor, action);
  game.check_action(infoset, deviation);
  return average(gated_deltas(game, trace_items(trace), ancestor, action, infoset)[deviation],
                 trace.horizon());
}

double counterfactual_regret_plus(const PlayTrace& trace, InfosetId ancestor, int action,
                                  InfosetId infoset) {
  const GameTree& game = *trace.game;
  check_descendant(game, ancestor, infoset);
  game.check_action(ancestor, action);
  return average(max_or_zero(gated_deltas(game, trace_items(trace), ancestor, action, infoset)),
                 trace.horizon());
}

InternalRegretValue counterfactual_internal_regret(const PlayTrace& trace, InfosetId infoset,
                                                   std::span<const int> history, int deviation) {
  const GameTree& game = *trace.game;
  game.check_action(infoset, deviation);
  const Infoset& info = game.infoset(infoset);
  if (history.size() != info.ancestry.size() + 1) {
    throw std::invalid_argument("signal history has the wrong length for this infoset");
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    const InfosetId at = k < info.ancestry.size() ? info.ancestry[k].infoset : infoset;
    if (history[k] < 0 || history[k] >= game.infoset(at).num_actions()) {
      throw std::invalid_argument("signal history is not realizable at this infoset");
    }
  }
  InternalRegretValue out;
  std::vector<int> scratch;
  for (const StepRecord& step : trace.steps) {
    const auto& s = step.profile.choices;
    bool match = s[infoset] == history.back();
    for (std::size_t k = 0; match && k < info.ancestry.size(); ++k) {
      match = s[info.ancestry[k].infoset] == history[k];
    }
    if (!match) continue;
    const detail::LocalValues v = detail::local_values(game, infoset, s, step.profile.chance, scratch);
    if (v.reachable) out.cumulative += v.deviation[deviation] - v.baseline;
  }
  out.average = average(out.cumulative, trace.horizon());
  return out;
}

double counterfactual_internal_regret_plus(const PlayTrace& trace, InfosetId infoset,
                                           std::span<const int> history) {
  double best = 0.0;
  for (int b = 0; b < trace.game->infoset(infoset).num_actions(); ++b) {
    best = std::max(best, counterfactual_internal_regret(trace, infoset, history, b).average);
  }
  return best;
}

double agent_regret(const PlayTrace& trace, InfosetId infoset, int action) {
  return counterfactual_regret_plus(trace, infoset, action, infoset);
}

double internal_regret(const PlayTrace& trace, InfosetId infoset, int action) {
  trace.game->check_action(infoset, action);
  return std::max(0.0, average(internal_value(*trace.game, trace_items(trace), infoset, action),
                               trace.horizon()));
}

double external_regret(const PlayTrace& trace, InfosetId ancestor, int action,
                       InfosetId infoset) {
  const GameTree& game = *trace.game;
  check_descendant(game, ancestor, infoset);
  game.check_action(ancestor, action);
  return average(external_value(game, trace_items(trace), ancestor, action, infoset),
                 trace.horizon());
}

double successor_cfr_sum(const PlayTrace& trace, InfosetId infoset, int action, int deviation) {
  const GameTree& game = *trace.game;
  game.check_action(infoset, action);
  game.check_action(infoset, deviation);
  const std::vector<Item> items = trace_items(trace);
  double sum = 0.0;
  for (InfosetId next : game.infoset(infoset).successors[deviation]) {
    for (InfosetId below : game.infoset(next).descendants) {
      sum += average(max_or_zero(gated_deltas(game, items, infoset, action, below)),
                     trace.horizon());
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// RegretLedger

RegretLedger::RegretLedger(std::shared_ptr<const GameTree> game) : game_(std::move(game)) {
  if (!game_) throw std::invalid_argument("null game");
}

void RegretLedger::add(const StepRecord& step) {
  const GameTree& game = *game_;
  const auto& s = step.profile.choices;
  const auto& chance = step.profile.chance;
  detail::mark_path(game, s, chance, on_path_);
  std::vector<int> key;
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    const detail::LocalValues v = detail::local_values(game, id, s, chance, scratch_);
    if (!v.reachable) continue;
    const Infoset& info = game.infoset(id);
    const int n = info.num_actions();
    auto add_to = [&](std::vector<double>& sums) {
      if (sums.empty()) sums.assign(n, 0.0);
      for (int b = 0; b < n; ++b) sums[b] += v.deviation[b] - v.baseline;
    };
    key.assign({id});
    for (const AncestryStep& a : info.ancestry) key.push_back(s[a.infoset]);
    key.push_back(s[id]);
    add_to(cfir_[key]);
    for (const AncestryStep& a : info.ancestry) {
      if (on_path_[a.infoset]) add_to(cfr_[{a.infoset, s[a.infoset], id}]);
    }
    if (on_path_[id]) add_to(cfr_[{id, s[id], id}]);
  }
  ++steps_;
}

void RegretLedger::add_all(const PlayTrace& trace) {
  for (const StepRecord& step : trace.steps) add(step);
}

double RegretLedger::plus(const std::vector<double>& sums) const {
  return average(max_or_zero(sums), steps_);
}

std::vector<RegretEntry> RegretLedger::snapshot() const {
  std::vector<RegretEntry> out;
  for (const auto& [key, sums] : cfir_) out.push_back({"cfir", key, plus(sums)});
  for (const auto& [key, sums] : cfr_) {
    if (key[0] == key[2]) out.push_back({"ar", {key[0], key[1]}, plus(sums)});
  }
  for (const auto& [key, sums] : cfr_) out.push_back({"cfr", key, plus(sums)});
  return out;
}

double RegretLedger::max_cfir_plus() const {
  double best = 0.0;
  for (const auto& [key, sums] : cfir_) best = std::max(best, plus(sums));
  return best;
}

double RegretLedger::max_ar_plus() const {
  double best = 0.0;
  for (const auto& [key, sums] : cfr_) {
    if (key[0] == key[2]) best = std::max(best, plus(sums));
  }
  return best;
}

namespace {

// The action of I^P on the way to `below`, or kInvalid if `below` is I^P.
int action_toward(const GameTree& game, InfosetId ancestor, InfosetId below) {
  for (const AncestryStep& step : game.infoset(below).ancestry) {
    if (step.infoset == ancestor) return step.action;
  }
  return kInvalid;
}

}  // namespace

double RegretLedger::max_successor_cfr_plus() const {
  double best = 0.0;
  for (const auto& [key, sums] : cfr_) {
    const int toward = action_toward(*game_, key[0], key[2]);
    if (toward != kInvalid && toward != key[1]) best = std::max(best, plus(sums));
  }
  return best;
}

double RegretLedger::max_successor_cfr_sum() const {
  // (I^P, a, b) -> sum of CFR+ over the infosets below b.
  std::map<std::tuple<int, int, int>, double> sums;
  for (const auto& [key, values] : cfr_) {
    const int toward = action_toward(*game_, key[0], key[2]);
    if (toward != kInvalid && toward != key[1]) {
      sums[{key[0], key[1], toward}] += plus(values);
    }
  }
  double best = 0.0;
  for (const auto& [key, value] : sums) best = std::max(best, value);
  return best;
}

// ---------------------------------------------------------------------------
// Distribution verifiers

double afce_epsilon(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  const SignalItems si = signal_items(game, h, cap);
  double best = 0.0;
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    for (int a = 0; a < game.infoset(id).num_actions(); ++a) {
      best = std::max(best, max_or_zero(gated_deltas(game, si.items, id, a, id)));
    }
  }
  return best;
}

double efce_epsilon(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  const SignalItems si = signal_items(game, h, cap);
  double best = 0.0;
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    for (int a = 0; a < game.infoset(id).num_actions(); ++a) {
      best = std::max(best, external_value(game, si.items, id, a, id));
    }
  }
  return best;
}

namespace {

// max over (I, h) of the best deviation plan's gain, gated by O (observed)
// or R (reachable).
double plan_epsilon(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap,
                    bool reach_gate) {
  const SignalItems si = signal_items(game, h, cap);
  double best = 0.0;
  std::vector<int> scratch;
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    const Solver solver(game, game.infoset(id).player, si.items);
    std::map<std::vector<int>, Gathered> groups;
    for (std::size_t k = 0; k < si.items.size(); ++k) {
      const Item& item = si.items[k];
      if (!reach_gate && !on_path(game, id, item)) continue;
      const detail::LocalValues v = detail::local_values(game, id, item.choices, item.chance, scratch);
      if (!v.reachable) continue;
      Gathered& g = groups[solver.history(id, k)];
      g.arrivals.push_back({v.node, k});
      g.baseline += item.weight * v.baseline;
    }
    for (const auto& [key, g] : groups) {
      best = std::max(best, solver.best_action(id, g.arrivals, true) - g.baseline);
    }
  }
  return best;
}

}  // namespace

double ace_epsilon(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  return plan_epsilon(game, h, cap, false);
}

double fce_epsilon(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  return plan_epsilon(game, h, cap, true);
}

double fce_local_epsilon(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  const SignalItems si = signal_items(game, h, cap);
  double best = 0.0;
  std::vector<int> scratch;
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    const Solver solver(game, game.infoset(id).player, si.items);
    std::map<std::vector<int>, std::vector<double>> sums;
    for (std::size_t k = 0; k < si.items.size(); ++k) {
      const Item& item = si.items[k];
      const detail::LocalValues v = detail::local_values(game, id, item.choices, item.chance, scratch);
      if (!v.reachable) continue;
      std::vector<double>& row = sums[solver.history(id, k)];
      row.resize(v.deviation.size(), 0.0);
      for (std::size_t b = 0; b < row.size(); ++b) {
        row[b] += item.weight * (v.deviation[b] - v.baseline);
      }
    }
    for (const auto& [key, row] : sums) best = std::max(best, max_or_zero(row));
  }
  return best;
}

bool EpsilonReport::nesting_holds() const { return nesting_violations().empty(); }

std::vector<std::string> EpsilonReport::nesting_violations() const {
  std::vector<std::string> out;
  if (fce < ace - kAuditTolerance) out.push_back("fce>=ace");
  if (ace < efce - kAuditTolerance) out.push_back("ace>=efce");
  if (efce < afce - kAuditTolerance) out.push_back("efce>=afce");
  return out;
}

EpsilonReport verify_signal(const GameTree& game, const EmpiricalSignal& h, std::uint64_t cap) {
  EpsilonReport r;
  r.afce = afce_epsilon(game, h, cap);
  r.efce = efce_epsilon(game, h, cap);
  r.ace = ace_epsilon(game, h, cap);
  r.fce = fce_epsilon(game, h, cap);
  r.fce_local = fce_local_epsilon(game, h, cap);
  r.payoff_range = game.payoff_range();
  return r;
}

// ---------------------------------------------------------------------------
// Decomposition gaps

double GapReport::max_gap() const {
  double best = kNegInf;
  for (const GapEntry& e : entries) best = std::max(best, e.gap());
  return entries.empty() ? 0.0 : best;
}

std::vector<GapEntry> GapReport::violations() const {
  std::vector<GapEntry> out;
  for (const GapEntry& e : entries) {
    if (e.gap() > tolerance) out.push_back(e);
  }
  return out;
}

GapReport decomposition_gaps(const PlayTrace& trace, double tolerance, std::uint64_t cap) {
  const GameTree& game = *trace.game;
  const std::uint64_t profiles = count_pure_profiles(game);
  if (profiles > cap) {
    throw CapExceededError("game too large for exhaustive oracle: " + std::to_string(profiles) +
                           " pure profiles exceed cap " + std::to_string(cap));
  }
  const std::vector<Item> items = trace_items(trace);
  const std::size_t T = trace.horizon();
  GapReport report;
  report.horizon = T;
  report.tolerance = tolerance;

  // CFR+(I^P, a, I) for every own pair, computed once.
  std::map<std::tuple<int, int, int>, double> cfr_plus;
  auto cfr = [&](InfosetId ancestor, int action, InfosetId infoset) {
    const auto key = std::make_tuple(ancestor, action, infoset);
    auto it = cfr_plus.find(key);
    if (it != cfr_plus.end()) return it->second;
    const double v = average(max_or_zero(gated_deltas(game, items, ancestor, action, infoset)), T);
    cfr_plus.emplace(key, v);
    return v;
  };

  for (InfosetId ancestor = 0; ancestor < game.num_infosets(); ++ancestor) {
    const Infoset& top = game.infoset(ancestor);
    for (int a = 0; a < top.num_actions(); ++a) {
      for (InfosetId infoset : top.descendants) {
        GapEntry e{"er", {ancestor, a, infoset}, 0.0, 0.0};
        e.lhs = std::max(0.0, average(external_value(game, items, ancestor, a, infoset), T));
        for (InfosetId below : game.infoset(infoset).descendants) e.rhs += cfr(ancestor, a, below);
        report.entries.push_back(std::move(e));
      }
      GapEntry e{"ir", {ancestor, a}, 0.0, 0.0};
      e.lhs = std::max(0.0, average(internal_value(game, items, ancestor, a), T));
      double tail = 0.0;
      for (int b = 0; b < top.num_actions(); ++b) {
        if (b == a) continue;
        double sum = 0.0;
        for (InfosetId next : top.successors[b]) {
          for (InfosetId below : game.infoset(next).descendants) sum += cfr(ancestor, a, below);
        }
        tail = std::max(tail, sum);
      }
      e.rhs = cfr(ancestor, a, ancestor) + tail;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

RegretReport regret_report(const PlayTrace& trace) {
  const GameTree& game = *trace.game;
  const std::vector<Item> items = trace_items(trace);
  const std::size_t T = trace.horizon();
  RegretReport report;
  report.horizon = T;
  report.payoff_range = game.payoff_range();
  RegretLedger ledger(trace.game);
  ledger.add_all(trace);
  for (InfosetId ancestor = 0; ancestor < game.num_infosets(); ++ancestor) {
    const Infoset& top = game.infoset(ancestor);
    for (int a = 0; a < top.num_actions(); ++a) {
      for (InfosetId infoset : top.descendants) {
        report.entries.push_back(
            {"er", {ancestor, a, infoset},
             std::max(0.0, average(external_value(game, items, ancestor, a, infoset), T))});
      }
    }
  }
  for (RegretEntry& e : ledger.snapshot()) {
    if (e.family == "cfr" || e.family == "cfir") report.entries.push_back(std::move(e));
  }
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    for (int a = 0; a < game.infoset(id).num_actions(); ++a) {
      report.entries.push_back(
          {"ir", {id, a}, std::max(0.0, average(internal_value(game, items, id, a), T))});
    }
  }
  for (InfosetId id = 0; id < game.num_infosets(); ++id) {
    for (int a = 0; a < game.infoset(id).num_actions(); ++a) {
      report.entries.push_back(
          {"ar", {id, a}, average(max_or_zero(gated_deltas(game, items, id, a, id)), T)});
    }
  }
  return report;
}

std::string describe_key(const GameTree& game, const std::string& family,
                         std::span<const int> key) {
  if (key.empty()) return family;
  const Infoset& first = game.infoset(key[0]);
  std::string out = "p" + std::to_string(first.player + 1) + "/" + first.label;
  if (family == "cfir") {
    const std::size_t n = key.size() - 1;
    out += "/";
    for (std::size_t k = 0; k < n; ++k) {
      const InfosetId at = k < first.ancestry.size() ? first.ancestry[k].infoset : key[0];
      if (k) out += ".";
      out += game.infoset(at).actions.at(key[k + 1]);
    }
    return out;
  }
  if (key.size() >= 2) out += "/" + first.actions.at(key[1]);
  if (key.size() >= 3) out += "/" + game.infoset(key[2]).label;
  return out;
}

std::string to_json(const GameTree& game, const RegretReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const RegretEntry& e : report.entries) {
    out.push_back({{"family", e.family},
                   {"key", describe_key(game, e.family, e.key)},
                   {"value", e.value},
                   {"T", report.horizon}});
  }
  return out.dump(2);
}

std::string to_json(const GameTree& game, const GapReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const GapEntry& e : report.violations()) {
    const std::string family = e.kind == "er" ? "cfr" : "ar";
    entries.push_back({{"family", e.kind},
                       {"key", describe_key(game, family, e.key)},
                       {"value", e.gap()},
                       {"T", report.horizon}});
  }
  nlohmann::json out = {{"ok", report.ok()},
                        {"max_gap", report.max_gap()},
                        {"tolerance", report.tolerance},
                        {"checked", report.entries.size()},
                        {"T", report.horizon},
                        {"violations", entries}};
  return out.dump(2);
}

std::string to_json(const EpsilonReport& report) {
  nlohmann::json out = {{"afce_epsilon", report.afce},
                        {"efce_epsilon", report.efce},
                        {"ace_epsilon", report.ace},
                        {"fce_epsilon", report.fce},
                        {"fce_local_epsilon", report.fce_local},
                        {"B", report.payoff_range},
                        {"nesting_holds", report.nesting_holds()},
                        {"nesting_violations", report.nesting_violations()}};
  return out.dump(2);
}

}  // namespace fcelab
