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

#ifndef FCELAB_AUDIT_HPP_
#define FCELAB_AUDIT_HPP_

// Regrets of a play trace and equilibrium gaps of a recommendation
// distribution.
//
// Notation: for a realized profile s and an infoset I of player p,
//   delta_b(s, I) = u(I, s|I->b) - u(I, s_I)
// is p's gain from switching to b at I, with p's earlier own moves forced
// toward I and everything else as recommended. Every regret family below is
// an average of delta terms (or of best continuations) under a different
// gate:
//   CFR(I^P, a, I, b)   O(s, I^P, a) * R(s, I)
//   CFIR(I, h, b)       R(s, I) * [S(s, I) == h]
//   AR(I, a)            O(s, I, a), best single b
//   ER(I^P, a, I)       O(s, I^P, a) * R(s, I), best continuation below I
//   IR(I, a)            O(s, I, a), best continuation with s'(I) != a
//
// Trace regrets use the realized chance of each step. Distribution
// verifiers take the expectation over the game's chance distribution; the
// empirical signal keys strategic choices only.
//
// Inner maxima over continuation strategies and deviation plans are solved
// by backward induction over the player's own infosets. Items reaching an
// own infoset under a deviation do not depend on how the deviation played
// elsewhere, so the recursion is exact.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcelab/game_model.hpp"
#include "fcelab/learners.hpp"

namespace fcelab {

inline constexpr double kAuditTolerance = 1e-9;

// Strategic choices -> probability.
using EmpiricalSignal = std::map<std::vector<int>, double>;

// Throws std::invalid_argument on an empty trace.
EmpiricalSignal empirical_signal(const PlayTrace& trace);
// Throws std::invalid_argument for negative weights, incomplete profiles or
// total mass off 1 by more than `tolerance`.
void check_signal(const GameTree& game, const EmpiricalSignal& h, double tolerance = 1e-9);

// Signal files: one support profile per line,
//   weight <w> profile <label>=<action> <label>=<action> ...
// naming every infoset once. A label shared by several players is written
// <player>:<label>. `#` starts a comment. Weights accept p/q fractions and
// must sum to 1 within 1e-6. Throws FormatError.
EmpiricalSignal parse_signal(const GameTree& game, std::string_view text);
std::string format_signal(const GameTree& game, const EmpiricalSignal& h);

// ---------------------------------------------------------------------------
// Trace regrets. All are averaged by the horizon T.

double counterfactual_regret(const PlayTrace& trace, InfosetId ancestor, int action,
                             InfosetId infoset, int deviation);
// max(0, max_b CFR(I^P, a, I, b)).
double counterfactual_regret_plus(const PlayTrace& trace, InfosetId ancestor, int action,
                                  InfosetId infoset);

struct InternalRegretValue {
  double cumulative = 0.0;
  double average = 0.0;
};
// `history` is a full signal history of `infoset`. Throws std::invalid_argument
// if it is not realizable there.
InternalRegretValue counterfactual_internal_regret(const PlayTrace& trace, InfosetId infoset,
                                                   std::span<const int> history, int deviation);
// max(0, max_b CFIR(I, h, b) / T).
double counterfactual_internal_regret_plus(const PlayTrace& trace, InfosetId infoset,
                                           std::span<const int> history);

// max_b CFR(I, a, I, b); nonnegative.
double agent_regret(const PlayTrace& trace, InfosetId infoset, int action);
// Positive part of the best gain over continuations s' with s'(I) != a.
double internal_regret(const PlayTrace& trace, InfosetId infoset, int action);
// Best gain over continuations below I, unclipped. Requires P(I^P) = P(I)
// and I in DES(I^P).
double external_regret(const PlayTrace& trace, InfosetId ancestor, int action,
                       InfosetId infoset);

// Throws std::invalid_argument unless P(I^P) = P(I) and I in DES(I^P).
void check_descendant(const GameTree& game, InfosetId ancestor, InfosetId infoset);

// Sum of CFR+(I, a, I'') over I'' in DES(Succ(I, b)).
double successor_cfr_sum(const PlayTrace& trace, InfosetId infoset, int action, int deviation);

// ---------------------------------------------------------------------------
// Streaming accumulators for per-step regrets; used for checkpoint curves.
//
// Families and key layouts:
//   "cfir"  {I, h_1, ..., h_k}   h is the full signal history of I
//   "ar"    {I, a}
//   "cfr"   {I^P, a, I}          I in DES(I^P), (I^P, a) observed

struct RegretEntry {
  std::string family;
  std::vector<int> key;
  double value = 0.0;  // average positive regret at the current horizon
};

class RegretLedger {
 public:
  explicit RegretLedger(std::shared_ptr<const GameTree> game);

  void add(const StepRecord& step);
  void add_all(const PlayTrace& trace);
  std::uint64_t steps() const { return steps_; }

  std::vector<RegretEntry> snapshot() const;
  double max_cfir_plus() const;
  double max_ar_plus() const;
  // Over cfr keys {I^P, a, I''} with I'' below some b != a at I^P: the terms
  // that bound internal regret beyond its agent part.
  double max_successor_cfr_plus() const;
  // max over (I, a, b != a) of the summed successor CFR+ terms.
  double max_successor_cfr_sum() const;

 private:
  double plus(const std::vector<double>& sums) const;

  std::shared_ptr<const GameTree> game_;
  std::uint64_t steps_ = 0;
  std::map<std::vector<int>, std::vector<double>> cfir_;
  std::map<std::vector<int>, std::vector<double>> cfr_;
  std::vector<char> on_path_;
  std::vector<int> scratch_;
};

// ---------------------------------------------------------------------------
// Distribution verifiers. Each returns the largest expected gain of the
// concept's deviations, clipped below at 0 so that h satisfies the concept
// within eps iff the result is <= eps. Throws CapExceededError when
// |support| * |chance outcomes| exceeds `cap`.

double afce_epsilon(const GameTree& game, const EmpiricalSignal& h,
                    std::uint64_t cap = kDefaultProfileCap);
double efce_epsilon(const GameTree& game, const EmpiricalSignal& h,
                    std::uint64_t cap = kDefaultProfileCap);
double ace_epsilon(const GameTree& game, const EmpiricalSignal& h,
                   std::uint64_t cap = kDefaultProfileCap);
double fce_epsilon(const GameTree& game, const EmpiricalSignal& h,
                   std::uint64_t cap = kDefaultProfileCap);
double fce_local_epsilon(const GameTree& game, const EmpiricalSignal& h,
                         std::uint64_t cap = kDefaultProfileCap);

struct EpsilonReport {
  double afce = 0.0;
  double efce = 0.0;
  double ace = 0.0;
  double fce = 0.0;
  double fce_local = 0.0;
  double payoff_range = 0.0;
  // fce >= ace >= efce >= afce, each within kAuditTolerance.
  bool nesting_holds() const;
  // Names of the links of the chain that fail.
  std::vector<std::string> nesting_violations() const;
};

EpsilonReport verify_signal(const GameTree& game, const EmpiricalSignal& h,
                            std::uint64_t cap = kDefaultProfileCap);

// ---------------------------------------------------------------------------
// Decomposition inequalities checked on a trace:
//   "er":  ER+(I^P, a, I) <= sum over I' in DES(I) of CFR+(I^P, a, I')
//   "ir":  IR+(I, a) <= AR+(I, a) + max_{b != a} successor_cfr_sum(I, a, b)
// gap = lhs - rhs; a violation is gap > tolerance.

struct GapEntry {
  std::string kind;
  std::vector<int> key;  // {I^P, a, I} for "er", {I, a} for "ir"
  double lhs = 0.0;
  double rhs = 0.0;
  double gap() const { return lhs - rhs; }
};

struct GapReport {
  std::uint64_t horizon = 0;
  double tolerance = kAuditTolerance;
  std::vector<GapEntry> entries;
  double max_gap() const;
  std::vector<GapEntry> violations() const;
  bool ok() const { return violations().empty(); }
};

// Throws CapExceededError when the game's pure profile count exceeds `cap`.
GapReport decomposition_gaps(const PlayTrace& trace, double tolerance = kAuditTolerance,
                             std::uint64_t cap = kDefaultProfileCap);

// ---------------------------------------------------------------------------
// Reports.

struct RegretReport {
  std::uint64_t horizon = 0;
  double payoff_range = 0.0;
  std::vector<RegretEntry> entries;  // families er, cfr, cfir, ir, ar
};

RegretReport regret_report(const PlayTrace& trace);

// Readable key path such as "p1/Jpb/p.b" or "p2/Qb/call/Qp".
std::string describe_key(const GameTree& game, const std::string& family,
                         std::span<const int> key);

// JSON array of {family, key, value, T}.
std::string to_json(const GameTree& game, const RegretReport& report);
std::string to_json(const GameTree& game, const GapReport& report);
std::string to_json(const EpsilonReport& report);

}  // namespace fcelab

#endif  // FCELAB_AUDIT_HPP_
