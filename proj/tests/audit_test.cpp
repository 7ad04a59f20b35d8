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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fcelab/audit.hpp"
#include "fcelab/game_io.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "random_games.hpp"
#include "test_util.hpp"

namespace fcelab {
namespace {

using testing::infoset_named;
using testing::profile_of;
using testing::shared_builtin;
using testing::trace_of;

constexpr double kTol = 1e-9;

EmpiricalSignal point_mass(const PureStrategyProfile& s) { return {{s.choices, 1.0}}; }

// Chance-free random game whose every player owns exactly one root-level
// infoset: a normal-form game in extensive clothing.
std::shared_ptr<const GameTree> random_one_shot(std::mt19937_64& rng) {
  GameDraft d;
  d.num_players = 2;
  const int n1 = std::uniform_int_distribution<int>(2, 3)(rng);
  const int n2 = std::uniform_int_distribution<int>(2, 3)(rng);
  DraftNode root;
  root.id = "r";
  root.kind = NodeKind::kDecision;
  root.player = 0;
  root.infoset_label = "A";
  std::vector<DraftNode> rest;
  for (int a = 0; a < n1; ++a) {
    root.actions.push_back("a" + std::to_string(a));
    root.children.push_back("m" + std::to_string(a));
    DraftNode mid;
    mid.id = "m" + std::to_string(a);
    mid.kind = NodeKind::kDecision;
    mid.player = 1;
    mid.infoset_label = "B";
    for (int b = 0; b < n2; ++b) {
      mid.actions.push_back("b" + std::to_string(b));
      DraftNode leaf;
      leaf.id = "t" + std::to_string(a) + std::to_string(b);
      leaf.kind = NodeKind::kTerminal;
      leaf.payoffs = {static_cast<double>(std::uniform_int_distribution<int>(-3, 3)(rng)),
                      static_cast<double>(std::uniform_int_distribution<int>(-3, 3)(rng))};
      mid.children.push_back(leaf.id);
      rest.push_back(leaf);
    }
    rest.push_back(mid);
  }
  d.nodes.push_back(root);
  for (DraftNode& n : rest) d.nodes.push_back(n);
  return std::make_shared<const GameTree>(GameTree::build(d));
}

TEST(Audit, EmpiricalSignal) {
  auto mp = shared_builtin("matching_pennies");
  const PureStrategyProfile hh = profile_of(*mp, {{"I1", "H"}, {"I2", "h"}});
  const PureStrategyProfile tt = profile_of(*mp, {{"I1", "T"}, {"I2", "t"}});
  const EmpiricalSignal one = empirical_signal(trace_of(mp, std::vector(10, hh)));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one.at(hh.choices), 1.0);
  const EmpiricalSignal two = empirical_signal(trace_of(mp, {hh, tt, hh, tt}));
  EXPECT_DOUBLE_EQ(two.at(hh.choices), 0.5);
  EXPECT_DOUBLE_EQ(two.at(tt.choices), 0.5);
  EXPECT_THROW(empirical_signal(trace_of(mp, {})), std::invalid_argument);

  std::mt19937_64 rng(1);
  auto kuhn = shared_builtin("kuhn_poker");
  const EmpiricalSignal h = empirical_signal(testing::random_trace(kuhn, 77, rng));
  double mass = 0.0;
  for (const auto& [_, w] : h) mass += w;
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_NO_THROW(check_signal(*kuhn, h));
  EXPECT_THROW(check_signal(*kuhn, {{std::vector<int>(12, 0), 0.5}}), std::invalid_argument);
  EXPECT_THROW(check_signal(*kuhn, {{std::vector<int>(11, 0), 1.0}}), std::invalid_argument);
}

TEST(Audit, SignalFiles) {
  const GameTree bos = builtin_game("battle_of_sexes_seq");
  const EmpiricalSignal h = parse_signal(bos, R"(# coordinated mix
weight 1/2 profile I1=O I2=o
weight 0.5 profile I2=f I1=F
)");
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(parse_signal(bos, format_signal(bos, h)), h);
  EXPECT_THROW(parse_signal(bos, "weight 0.5 profile I1=O I2=o\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, "weight 1 profile I1=O\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, "weight 1 profile I1=O I2=x\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, "weight 1 profile I1=O I3=o\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, "weight 1 profile I1=O I1=F I2=o\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, "weight -1 profile I1=O I2=o\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, "w 1 profile I1=O I2=o\n"), FormatError);
  EXPECT_THROW(parse_signal(bos, ""), FormatError);
  // Within 1e-6 of 1 is accepted.
  EXPECT_NO_THROW(parse_signal(bos, "weight 0.9999995 profile I1=O I2=o\n"));

  const GameTree kuhn = builtin_game("kuhn_poker");
  EXPECT_EQ(parse_signal(kuhn, format_signal(kuhn, {{std::vector<int>(12, 1), 1.0}})).size(), 1u);
}

TEST(Audit, CounterfactualRegretHandSums) {
  auto mp = shared_builtin("matching_pennies");
  const InfosetId i1 = infoset_named(*mp, "I1");
  const InfosetId i2 = infoset_named(*mp, "I2");
  std::vector<PureStrategyProfile> all;
  for (const char* a : {"H", "T"}) {
    for (const char* b : {"h", "t"}) all.push_back(profile_of(*mp, {{"I1", a}, {"I2", b}}));
  }
  const PlayTrace each_once = trace_of(mp, all);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      EXPECT_NEAR(counterfactual_regret(each_once, i2, a, i2, b), 0.0, kTol);
      EXPECT_NEAR(counterfactual_regret(each_once, i1, a, i1, b), 0.0, kTol);
    }
  }
  // (H,h) twice and (T,t) once: player 1 loses 2 by switching from a win,
  // player 2 gains 2 by switching from a loss.
  const PlayTrace skew = trace_of(mp, {all[0], all[0], all[3]});
  EXPECT_NEAR(counterfactual_regret(skew, i1, 0, i1, 1), -4.0 / 3.0, kTol);
  EXPECT_NEAR(counterfactual_regret(skew, i2, 0, i2, 1), 4.0 / 3.0, kTol);
  EXPECT_NEAR(counterfactual_regret(skew, i2, 1, i2, 0), 2.0 / 3.0, kTol);
  EXPECT_NEAR(counterfactual_regret_plus(skew, i1, 0, i1), 0.0, kTol);
  EXPECT_NEAR(counterfactual_regret_plus(skew, i2, 0, i2), 4.0 / 3.0, kTol);
  // Deviation equal to play, and an empty filter.
  EXPECT_EQ(counterfactual_regret(trace_of(mp, {all[0], all[0]}), i1, 0, i1, 0), 0.0);
  EXPECT_EQ(counterfactual_regret(trace_of(mp, {all[0], all[0]}), i1, 1, i1, 0), 0.0);
}

TEST(Audit, InternalRegretSixSteps) {
  auto solo = shared_builtin("two_stage_solo");
  const InfosetId i1 = infoset_named(*solo, "I1");
  const InfosetId i2 = infoset_named(*solo, "I2");
  auto p = [&](const char* a, const char* b) { return profile_of(*solo, {{"I1", a}, {"I2", b}}); };
  // Payoffs: (A,C)=2, (A,D)=0, B=1.
  const PlayTrace trace =
      trace_of(solo, {p("A", "C"), p("A", "D"), p("B", "C"), p("B", "D"), p("A", "C"), p("B", "D")});
  auto cfir = [&](InfosetId i, std::vector<int> h, int b) {
    return counterfactual_internal_regret(trace, i, h, b);
  };
  EXPECT_NEAR(cfir(i2, {0, 0}, 1).cumulative, -4.0, kTol);
  EXPECT_NEAR(cfir(i2, {0, 0}, 1).average, -4.0 / 6.0, kTol);
  EXPECT_NEAR(cfir(i2, {1, 1}, 0).cumulative, 4.0, kTol);
  EXPECT_NEAR(cfir(i2, {1, 0}, 1).cumulative, -2.0, kTol);
  EXPECT_NEAR(cfir(i1, {1}, 0).cumulative, -1.0, kTol);
  EXPECT_NEAR(cfir(i1, {0}, 1).cumulative, -1.0, kTol);
  for (const SignalHistory& h : all_signal_histories(*solo, i2)) {
    EXPECT_EQ(cfir(i2, h.actions, h.actions.back()).cumulative, 0.0);
  }
  EXPECT_NEAR(counterfactual_internal_regret_plus(trace, i2, std::vector<int>{1, 1}), 4.0 / 6.0, kTol);
  EXPECT_EQ(counterfactual_internal_regret_plus(trace_of(solo, {p("A", "C")}), i2,
                                                std::vector<int>{1, 1}),
            0.0);
  EXPECT_THROW(cfir(i2, {0}, 0), std::invalid_argument);
}

TEST(Audit, AgentRegret) {
  auto mp = shared_builtin("matching_pennies");
  const PureStrategyProfile hh = profile_of(*mp, {{"I1", "H"}, {"I2", "h"}});
  const PlayTrace trace = trace_of(mp, std::vector(100, hh));
  EXPECT_NEAR(agent_regret(trace, infoset_named(*mp, "I1"), 0), 0.0, kTol);
  EXPECT_NEAR(agent_regret(trace, infoset_named(*mp, "I2"), 0), 2.0, kTol);
  EXPECT_EQ(internal_regret(trace, infoset_named(*mp, "I1"), 1), 0.0);

  std::mt19937_64 rng(4);
  for (int g = 0; g < 20; ++g) {
    testing::RandomGameOptions opt;
    opt.chance = g % 2;
    const auto game = testing::random_game(rng, opt);
    const PlayTrace t = testing::random_trace(game, 30, rng);
    for (InfosetId i = 0; i < game->num_infosets(); ++i) {
      for (int a = 0; a < game->infoset(i).num_actions(); ++a) {
        EXPECT_GE(agent_regret(t, i, a), 0.0);
        EXPECT_GE(internal_regret(t, i, a), 0.0);
      }
    }
  }
}

TEST(Audit, OneShotRegretRelations) {
  std::mt19937_64 rng(5);
  for (int g = 0; g < 30; ++g) {
    const auto game = random_one_shot(rng);
    const PlayTrace t = testing::random_trace(game, 40, rng);
    for (InfosetId i = 0; i < game->num_infosets(); ++i) {
      for (int a = 0; a < game->infoset(i).num_actions(); ++a) {
        EXPECT_LE(agent_regret(t, i, a), internal_regret(t, i, a) + kTol);
        if (game->infoset(i).num_actions() == 2) {
          EXPECT_NEAR(agent_regret(t, i, a), internal_regret(t, i, a), kTol);
        }
      }
    }
  }
}

TEST(Audit, ExternalRegret) {
  auto solo = shared_builtin("two_stage_solo");
  const InfosetId i1 = infoset_named(*solo, "I1");
  const InfosetId i2 = infoset_named(*solo, "I2");
  std::mt19937_64 rng(6);
  const PlayTrace t = testing::random_trace(solo, 25, rng);
  const double cfr_best = std::max(counterfactual_regret(t, i1, 0, i2, 0),
                                   counterfactual_regret(t, i1, 0, i2, 1));
  EXPECT_NEAR(external_regret(t, i1, 0, i2), cfr_best, kTol);
  const PlayTrace only_a = trace_of(solo, {profile_of(*solo, {{"I1", "A"}})});
  EXPECT_EQ(external_regret(only_a, i1, 1, i2), 0.0);
  EXPECT_THROW(external_regret(t, i2, 0, i1), std::invalid_argument);
  auto mp = shared_builtin("matching_pennies");
  EXPECT_THROW(check_descendant(*mp, 0, 1), std::invalid_argument);
}

// Best-continuation search against enumeration of every pure strategy.
TEST(Audit, RegretSearchMatchesEnumeration) {
  std::mt19937_64 rng(8);
  for (int g = 0; g < 25; ++g) {
    testing::RandomGameOptions opt;
    opt.chance = g % 3 == 0;
    opt.players = g % 4 == 0 ? 1 : 2;
    const auto game = testing::random_game(rng, opt);
    const PlayTrace t = testing::random_trace(game, 50, rng);
    for (InfosetId ip = 0; ip < game->num_infosets(); ++ip) {
      const Infoset& up = game->infoset(ip);
      for (int a = 0; a < up.num_actions(); ++a) {
        EXPECT_NEAR(internal_regret(t, ip, a), testing::oracle_internal_regret(t, ip, a), kTol);
        for (InfosetId i : up.descendants) {
          EXPECT_NEAR(external_regret(t, ip, a, i), testing::oracle_external_regret(t, ip, a, i),
                      kTol);
          for (int b = 0; b < game->infoset(i).num_actions(); ++b) {
            EXPECT_NEAR(counterfactual_regret(t, ip, a, i, b),
                        testing::oracle_counterfactual_regret(t, ip, a, i, b), kTol);
          }
        }
      }
    }
  }
}

TEST(Audit, BattleOfSexesSignals) {
  const GameTree bos = builtin_game("battle_of_sexes_seq");
  const PureStrategyProfile oo = profile_of(bos, {{"I1", "O"}, {"I2", "o"}});
  const PureStrategyProfile ff = profile_of(bos, {{"I1", "F"}, {"I2", "f"}});
  const PureStrategyProfile of = profile_of(bos, {{"I1", "O"}, {"I2", "f"}});
  const EpsilonReport nash = verify_signal(bos, point_mass(oo));
  EXPECT_EQ(nash.afce, 0.0);
  EXPECT_EQ(nash.efce, 0.0);
  EXPECT_EQ(nash.ace, 0.0);
  EXPECT_EQ(nash.fce, 0.0);
  EXPECT_EQ(nash.fce_local, 0.0);
  EXPECT_EQ(nash.payoff_range, 2.0);
  EXPECT_EQ(afce_epsilon(bos, {{oo.choices, 0.5}, {ff.choices, 0.5}}), 0.0);
  // Mis-coordinated: player 2 gains 1 by switching to o.
  EXPECT_NEAR(afce_epsilon(bos, point_mass(of)), 1.0, kTol);

  const GameTree mp = builtin_game("matching_pennies");
  EmpiricalSignal uniform;
  for (const PureStrategyProfile& s : enumerate_pure_profiles(mp)) uniform[s.choices] = 0.25;
  EXPECT_EQ(afce_epsilon(mp, uniform), 0.0);
  EXPECT_EQ(verify_signal(mp, uniform).fce, 0.0);
}

// An agent deviating into an unplayed branch keeps following recommendations
// there, which stay correlated with the opponent; a trigger deviation commits
// to a fixed continuation and cannot exploit that correlation.
TEST(Audit, AgentFormCanExceedExtensiveForm) {
  const GameTree g = parse_game(R"(game detour players 2
node r player 1 infoset I1 { L -> l, R -> m }
node l terminal { 0, 0 }
node m player 1 infoset I2 { x -> px, y -> py }
node px player 2 infoset J { x -> xx, y -> xy }
node py player 2 infoset J { x -> yx, y -> yy }
node xx terminal { 1, 0 }
node xy terminal { -1, 0 }
node yx terminal { -1, 0 }
node yy terminal { 1, 0 })");
  const EmpiricalSignal h = parse_signal(g, "weight 1/2 profile I1=L I2=x J=x\n"
                                            "weight 1/2 profile I1=L I2=y J=y\n");
  const EpsilonReport r = verify_signal(g, h);
  EXPECT_NEAR(r.afce, 1.0, kTol);
  EXPECT_NEAR(r.efce, 0.0, kTol);
  EXPECT_NEAR(r.ace, 1.0, kTol);
  EXPECT_NEAR(r.fce, 1.0, kTol);
  EXPECT_EQ(r.nesting_violations(), std::vector<std::string>{"efce>=afce"});
}

TEST(Audit, OneShotConceptsCoincide) {
  std::mt19937_64 rng(10);
  for (int g = 0; g < 40; ++g) {
    const auto game = random_one_shot(rng);
    const EmpiricalSignal h = testing::random_signal(*game, 6, rng);
    const EpsilonReport r = verify_signal(*game, h);
    EXPECT_NEAR(r.efce, r.afce, kTol);
    EXPECT_NEAR(r.ace, r.efce, kTol);
    EXPECT_NEAR(r.fce, r.ace, kTol);
    EXPECT_NEAR(r.fce_local, r.fce, kTol);
  }
}

TEST(Audit, SoloPlansContainBlindStrategies) {
  std::mt19937_64 rng(12);
  for (int g = 0; g < 40; ++g) {
    testing::RandomGameOptions opt;
    opt.players = 1;
    opt.chance = g % 2;
    opt.max_actions = 2;
    const auto game = testing::random_game(rng, opt);
    const EmpiricalSignal h = testing::random_signal(*game, 5, rng);
    EXPECT_GE(ace_epsilon(*game, h), efce_epsilon(*game, h) - kTol);
  }
}

// Verifiers against brute-force enumeration, with chance.
TEST(Audit, VerifiersMatchEnumeration) {
  std::mt19937_64 rng(13);
  int checked_plans = 0;
  for (int g = 0; g < 40; ++g) {
    testing::RandomGameOptions opt;
    opt.chance = g % 2;
    opt.max_actions = g % 3 == 0 ? 3 : 2;
    const auto game = testing::random_game(rng, opt);
    const EmpiricalSignal h = testing::random_signal(*game, 5, rng);
    const EpsilonReport r = verify_signal(*game, h);
    EXPECT_NEAR(r.afce, testing::oracle_afce(*game, h), kTol);
    EXPECT_NEAR(r.efce, testing::oracle_efce(*game, h), kTol);
    EXPECT_NEAR(r.fce_local, testing::oracle_fce_local(*game, h), kTol);
    if (auto v = testing::oracle_ace(*game, h, 1u << 14)) {
      EXPECT_NEAR(r.ace, *v, kTol);
      ++checked_plans;
    }
    if (auto v = testing::oracle_fce(*game, h, 1u << 14)) {
      EXPECT_NEAR(r.fce, *v, kTol);
    }
    EXPECT_LE(r.fce_local, r.fce + kTol);
    EXPECT_EQ(r.fce <= kTol, r.fce_local <= kTol);
  }
  EXPECT_GT(checked_plans, 20);
}

// Expected-utility verification over chance equals the probability-weighted
// sum of per-deal terms.
TEST(Audit, ChanceInvarianceKuhn) {
  auto kuhn = shared_builtin("kuhn_poker");
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    LearnerConfig cfg;
    cfg.seed = seed;
    const PlayTrace trace = run_fce(kuhn, 6, cfg);
    const EmpiricalSignal h = empirical_signal(trace);
    const EpsilonReport r = verify_signal(*kuhn, h);
    EXPECT_NEAR(r.afce, testing::oracle_afce(*kuhn, h), kTol);
    EXPECT_NEAR(r.efce, testing::oracle_efce(*kuhn, h), kTol);
    EXPECT_NEAR(r.fce_local, testing::oracle_fce_local(*kuhn, h), kTol);
    const auto ace = testing::oracle_ace(*kuhn, h, 1u << 16);
    const auto fce = testing::oracle_fce(*kuhn, h, 1u << 16);
    ASSERT_TRUE(ace && fce);
    EXPECT_NEAR(r.ace, *ace, kTol);
    EXPECT_NEAR(r.fce, *fce, kTol);
  }
}

// On chance-free games the trace regrets and the signal verifiers are the
// same averages.
TEST(Audit, RegretEpsilonBridge) {
  std::mt19937_64 rng(14);
  for (int g = 0; g < 30; ++g) {
    testing::RandomGameOptions opt;
    const auto game = testing::random_game(rng, opt);
    const PlayTrace t = testing::random_trace(game, 40, rng);
    RegretLedger ledger(game);
    ledger.add_all(t);
    const EmpiricalSignal h = empirical_signal(t);
    EXPECT_NEAR(ledger.max_cfir_plus(), fce_local_epsilon(*game, h), kTol);
    EXPECT_NEAR(ledger.max_ar_plus(), afce_epsilon(*game, h), kTol);
    // IR deviations are the trigger deviations with s'(I) != a, so they
    // bound efce from below; the reverse fails when the best trigger
    // deviation repeats a and changes play further down.
    double ir = 0.0;
    for (InfosetId i = 0; i < game->num_infosets(); ++i) {
      for (int a = 0; a < game->infoset(i).num_actions(); ++a) {
        ir = std::max(ir, internal_regret(t, i, a));
      }
    }
    EXPECT_GE(efce_epsilon(*game, h), ir - kTol);
  }
  for (std::string_view name : {"gated_entry", "two_stage_solo", "battle_of_sexes_seq"}) {
    auto game = shared_builtin(name);
    LearnerConfig cfg;
    const PlayTrace t = run_efce(game, 500, cfg);
    RegretLedger ledger(game);
    ledger.add_all(t);
    EXPECT_NEAR(ledger.max_ar_plus(), afce_epsilon(*game, empirical_signal(t)), kTol);
  }
}

TEST(Audit, LedgerMatchesDirectRegrets) {
  std::mt19937_64 rng(15);
  auto kuhn = shared_builtin("kuhn_poker");
  const PlayTrace t = testing::random_trace(kuhn, 60, rng);
  RegretLedger ledger(kuhn);
  ledger.add_all(t);
  EXPECT_EQ(ledger.steps(), 60u);
  double ar = 0.0;
  double cfir = 0.0;
  for (InfosetId i = 0; i < kuhn->num_infosets(); ++i) {
    for (int a = 0; a < 2; ++a) ar = std::max(ar, agent_regret(t, i, a));
    for (const SignalHistory& h : all_signal_histories(*kuhn, i)) {
      cfir = std::max(cfir, counterfactual_internal_regret_plus(t, i, h.actions));
    }
  }
  EXPECT_NEAR(ledger.max_ar_plus(), ar, kTol);
  EXPECT_NEAR(ledger.max_cfir_plus(), cfir, kTol);
  for (const RegretEntry& e : ledger.snapshot()) EXPECT_GE(e.value, 0.0);
}

TEST(Audit, DecompositionGaps) {
  auto solo = shared_builtin("two_stage_solo");
  std::mt19937_64 rng(16);
  for (int k = 0; k < 10; ++k) {
    const GapReport report = decomposition_gaps(testing::random_trace(solo, 30, rng));
    EXPECT_TRUE(report.ok());
    EXPECT_LE(report.max_gap(), kTol);
    EXPECT_FALSE(report.entries.empty());
  }
  // One-shot: no successors, so IR and AR coincide.
  for (int g = 0; g < 10; ++g) {
    const auto game = random_one_shot(rng);
    const GapReport report = decomposition_gaps(testing::random_trace(game, 30, rng));
    for (const GapEntry& e : report.entries) {
      if (e.kind == "ir" && game->infoset(e.key[0]).num_actions() == 2) {
        EXPECT_NEAR(e.lhs, e.rhs, kTol);
      }
      EXPECT_LE(e.gap(), kTol);
    }
  }
  for (int g = 0; g < 5; ++g) {
    testing::RandomGameOptions opt;
    opt.chance = g % 2;
    const auto game = testing::random_game(rng, opt);
    for (int k = 0; k < 20; ++k) {
      const GapReport report = decomposition_gaps(testing::random_trace(game, 40, rng));
      EXPECT_TRUE(report.ok()) << report.max_gap();
    }
  }
  auto kuhn = shared_builtin("kuhn_poker");
  EXPECT_THROW(decomposition_gaps(testing::random_trace(kuhn, 5, rng), kTol, 100),
               CapExceededError);
  EXPECT_THROW(verify_signal(*kuhn, empirical_signal(testing::random_trace(kuhn, 5, rng)), 10),
               CapExceededError);
}

TEST(Audit, ReportsAndJson) {
  auto kuhn = shared_builtin("kuhn_poker");
  LearnerConfig cfg;
  const PlayTrace t = run_fce(kuhn, 50, cfg);
  const RegretReport report = regret_report(t);
  EXPECT_EQ(report.horizon, 50u);
  EXPECT_EQ(report.payoff_range, 4.0);
  std::set<std::string> families;
  for (const RegretEntry& e : report.entries) {
    families.insert(e.family);
    EXPECT_GE(e.value, -kTol) << e.family;
  }
  EXPECT_EQ(families, (std::set<std::string>{"ar", "cfir", "cfr", "er", "ir"}));
  const nlohmann::json j = nlohmann::json::parse(to_json(*kuhn, report));
  ASSERT_TRUE(j.is_array());
  for (const char* field : {"family", "key", "value", "T"}) EXPECT_TRUE(j[0].contains(field));

  const nlohmann::json e = nlohmann::json::parse(to_json(verify_signal(*kuhn, empirical_signal(t))));
  for (const char* field : {"afce_epsilon", "efce_epsilon", "ace_epsilon", "fce_epsilon",
                            "fce_local_epsilon", "B"}) {
    EXPECT_TRUE(e.contains(field)) << field;
  }

  const InfosetId jpb = infoset_named(*kuhn, "Jpb");
  EXPECT_EQ(describe_key(*kuhn, "cfir", std::vector<int>{jpb, 0, 1}), "p1/Jpb/p.b");
  EXPECT_EQ(describe_key(*kuhn, "cfr", std::vector<int>{infoset_named(*kuhn, "J"), 0, jpb}),
            "p1/J/p/Jpb");
}

}  // namespace
}  // namespace fcelab
