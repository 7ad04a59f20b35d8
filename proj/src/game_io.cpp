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

#include "fcelab/game_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fcelab {

std::string_view to_string(ParseCode code) {
  switch (code) {
    case ParseCode::kSyntax: return "syntax-error";
    case ParseCode::kUnknownChild: return "unknown-child";
    case ParseCode::kStructure: return "structure-error";
    case ParseCode::kInfosetMismatch: return "infoset-mismatch";
    case ParseCode::kProbabilitySum: return "probability-sum";
    case ParseCode::kRecallViolation: return "recall-violation";
  }
  return "unknown";
}

std::string ParseError::diagnostic(std::string_view file) const {
  std::ostringstream out;
  out << file << ':' << line_ << ':' << column_ << ": " << to_string(code_) << ": " << what();
  return out.str();
}

namespace {

enum class Tok { kWord, kOpen, kClose, kComma, kColon, kArrow, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool is_punct(char c) { return c == '{' || c == '}' || c == ',' || c == ':' || c == '#'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    const int l = line;
    const int col = column;
    if (text.substr(i, 2) == "->") {
      out.push_back({Tok::kArrow, "->", l, col});
      advance(2);
      continue;
    }
    switch (c) {
      case '{': out.push_back({Tok::kOpen, "{", l, col}); advance(1); continue;
      case '}': out.push_back({Tok::kClose, "}", l, col}); advance(1); continue;
      case ',': out.push_back({Tok::kComma, ",", l, col}); advance(1); continue;
      case ':': out.push_back({Tok::kColon, ":", l, col}); advance(1); continue;
      default: break;
    }
    std::size_t j = i;
    while (j < text.size() && !is_punct(text[j]) && text[j] != ' ' && text[j] != '\t' &&
           text[j] != '\r' && text[j] != '\n' && text.substr(j, 2) != "->") {
      ++j;
    }
    out.push_back({Tok::kWord, std::string(text.substr(i, j - i)), l, col});
    advance(j - i);
  }
  out.push_back({Tok::kEnd, "", line, column});
  return out;
}

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::kWord: return "a word";
    case Tok::kOpen: return "'{'";
    case Tok::kClose: return "'}'";
    case Tok::kComma: return "','";
    case Tok::kColon: return "':'";
    case Tok::kArrow: return "'->'";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

bool parse_double(std::string_view word, double& value) {
  const char* begin = word.data();
  const char* end = word.data() + word.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

// Decimal or p/q.
bool parse_number(std::string_view word, double& value) {
  const auto slash = word.find('/');
  if (slash == std::string_view::npos) return parse_double(word, value);
  double num = 0.0;
  double den = 0.0;
  if (!parse_double(word.substr(0, slash), num) || !parse_double(word.substr(slash + 1), den) ||
      den == 0.0) {
    return false;
  }
  value = num / den;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  GameDraft parse() {
    GameDraft draft;
    keyword("game");
    draft.name = word("game name").text;
    keyword("players");
    const Token& n = word("player count");
    int players = 0;
    auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), players);
    if (ec != std::errc() || ptr != n.text.data() + n.text.size() || players < 1) {
      fail(n, "player count must be a positive integer, got '" + n.text + "'");
    }
    draft.num_players = players;
    while (peek().kind != Tok::kEnd) draft.nodes.push_back(node(draft.num_players));
    return draft;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(ParseCode::kSyntax, at.line, at.column, message);
  }

  const Token& expect(Tok kind) {
    const Token& t = next();
    if (t.kind != kind) {
      fail(t, "expected " + std::string(describe(kind)) + ", found " +
                  (t.kind == Tok::kWord ? "'" + t.text + "'" : std::string(describe(t.kind))));
    }
    return t;
  }

  const Token& word(std::string_view what) {
    const Token& t = next();
    if (t.kind != Tok::kWord) {
      fail(t, "expected " + std::string(what) + ", found " + std::string(describe(t.kind)));
    }
    return t;
  }

  void keyword(std::string_view kw) {
    const Token& t = word(kw);
    if (t.text != kw) fail(t, "expected '" + std::string(kw) + "', found '" + t.text + "'");
  }

  double number(std::string_view what) {
    const Token& t = word(what);
    double v = 0.0;
    if (!parse_number(t.text, v)) fail(t, "invalid " + std::string(what) + " '" + t.text + "'");
    return v;
  }

  template <typename Item>
  void braced_list(Item&& item) {
    expect(Tok::kOpen);
    item();
    while (peek().kind == Tok::kComma) {
      next();
      item();
    }
    expect(Tok::kClose);
  }

  DraftNode node(int num_players) {
    const Token& start = peek();
    keyword("node");
    DraftNode out;
    out.id = word("node id").text;
    out.line = start.line;
    out.column = start.column;
    const Token& kind = word("node kind");
    if (kind.text == "player") {
      out.kind = NodeKind::kDecision;
      const Token& p = word("player number");
      int player = 0;
      auto [ptr, ec] = std::from_chars(p.text.data(), p.text.data() + p.text.size(), player);
      if (ec != std::errc() || ptr != p.text.data() + p.text.size()) {
        fail(p, "invalid player number '" + p.text + "'");
      }
      if (player < 1 || player > num_players) {
        fail(p, "player " + p.text + " out of range 1.." + std::to_string(num_players));
      }
      out.player = player - 1;
      keyword("infoset");
      out.infoset_label = word("infoset label").text;
      braced_list([&] {
        out.actions.push_back(word("action").text);
        expect(Tok::kArrow);
        out.children.push_back(word("child id").text);
      });
    } else if (kind.text == "chance") {
      out.kind = NodeKind::kChance;
      braced_list([&] {
        out.actions.push_back(word("outcome").text);
        expect(Tok::kColon);
        out.probabilities.push_back(number("probability"));
        expect(Tok::kArrow);
        out.children.push_back(word("child id").text);
      });
    } else if (kind.text == "terminal") {
      out.kind = NodeKind::kTerminal;
      braced_list([&] { out.payoffs.push_back(number("payoff")); });
    } else {
      fail(kind, "expected 'player', 'chance' or 'terminal', found '" + kind.text + "'");
    }
    return out;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

ParseCode code_for(StructureIssue issue) {
  switch (issue) {
    case StructureIssue::kUnknownChild: return ParseCode::kUnknownChild;
    case StructureIssue::kInfosetMismatch: return ParseCode::kInfosetMismatch;
    case StructureIssue::kProbabilitySum:
    case StructureIssue::kBadProbability: return ParseCode::kProbabilitySum;
    default: return ParseCode::kStructure;
  }
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    std::array<char, 32> shorter{};
    std::snprintf(shorter.data(), shorter.size(), "%.*g", precision, v);
    if (std::strtod(shorter.data(), nullptr) == v) return shorter.data();
  }
  return buf.data();
}

}  // namespace

std::optional<double> parse_game_number(std::string_view word) {
  double value = 0.0;
  if (!parse_number(word, value)) return std::nullopt;
  return value;
}

GameDraft parse_game_draft(std::string_view text) { return Parser(text).parse(); }

GameTree parse_game(std::string_view text) {
  GameDraft draft = parse_game_draft(text);
  if (auto errors = check_structure(draft); !errors.empty()) {
    const StructuralError& e = errors.front();
    throw ParseError(code_for(e.issue), e.line, e.column, e.message);
  }
  GameTree game = GameTree::build(draft, RecallPolicy::kSkip);
  ValidationReport report = validate_perfect_recall(game);
  if (!report.recall.empty()) {
    const RecallViolation& v = report.recall.front();
    const std::string& bad = game.node(v.second_node).label;
    int line = 0;
    int column = 0;
    for (const DraftNode& n : draft.nodes) {
      if (n.id == bad) {
        line = n.line;
        column = n.column;
      }
    }
    throw ParseError(ParseCode::kRecallViolation, line, column,
                     "infoset '" + v.label + "' of player " + std::to_string(v.player + 1) +
                         " merges nodes '" + game.node(v.first_node).label + "' and '" + bad +
                         "' with different histories");
  }
  return GameTree::build(draft, RecallPolicy::kEnforce);
}

GameTree load_game_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str());
}

std::string serialize_game(const GameTree& game) {
  std::ostringstream out;
  out << "game " << game.name() << " players " << game.num_players() << '\n';
  for (const Node& node : game.nodes()) {
    out << "node " << node.label;
    switch (node.kind) {
      case NodeKind::kDecision: {
        const Infoset& info = game.infoset(node.infoset);
        out << " player " << node.player + 1 << " infoset " << info.label << " { ";
        for (int a = 0; a < info.num_actions(); ++a) {
          out << (a ? ", " : "") << info.actions[a] << " -> " << game.node(node.children[a]).label;
        }
        out << " }";
        break;
      }
      case NodeKind::kChance:
        out << " chance { ";
        for (std::size_t a = 0; a < node.children.size(); ++a) {
          out << (a ? ", " : "") << node.chance_actions[a] << " : "
              << format_number(node.probabilities[a]) << " -> " << game.node(node.children[a]).label;
        }
        out << " }";
        break;
      case NodeKind::kTerminal:
        out << " terminal { ";
        for (std::size_t p = 0; p < node.payoffs.size(); ++p) {
          out << (p ? ", " : "") << format_number(node.payoffs[p]);
        }
        out << " }";
        break;
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Built-in games.

namespace {

class DraftBuilder {
 public:
  DraftBuilder(std::string name, int players) {
    draft_.name = std::move(name);
    draft_.num_players = players;
  }

  std::string decision(int player, std::string infoset, std::vector<std::string> actions,
                       std::vector<std::string> children, std::string id = {}) {
    DraftNode n;
    n.id = id.empty() ? fresh() : std::move(id);
    n.kind = NodeKind::kDecision;
    n.player = player - 1;
    n.infoset_label = std::move(infoset);
    n.actions = std::move(actions);
    n.children = std::move(children);
    return add(std::move(n));
  }

  std::string chance(std::vector<std::string> outcomes, std::vector<double> probs,
                     std::vector<std::string> children) {
    DraftNode n;
    n.id = fresh();
    n.kind = NodeKind::kChance;
    n.actions = std::move(outcomes);
    n.probabilities = std::move(probs);
    n.children = std::move(children);
    return add(std::move(n));
  }

  std::string terminal(std::vector<double> payoffs) {
    DraftNode n;
    n.id = fresh();
    n.kind = NodeKind::kTerminal;
    n.payoffs = std::move(payoffs);
    return add(std::move(n));
  }

  // The root is the last node added; move it to the front.
  GameTree finish() {
    std::rotate(draft_.nodes.rbegin(), draft_.nodes.rbegin() + 1, draft_.nodes.rend());
    return GameTree::build(draft_);
  }

 private:
  std::string fresh() { return "n" + std::to_string(counter_++); }
  std::string add(DraftNode n) {
    draft_.nodes.push_back(std::move(n));
    return draft_.nodes.back().id;
  }

  GameDraft draft_;
  int counter_ = 0;
};

GameTree matching_pennies() {
  DraftBuilder b("matching_pennies", 2);
  const auto hh = b.terminal({1, -1});
  const auto ht = b.terminal({-1, 1});
  const auto th = b.terminal({-1, 1});
  const auto tt = b.terminal({1, -1});
  const auto h = b.decision(2, "I2", {"h", "t"}, {hh, ht});
  const auto t = b.decision(2, "I2", {"h", "t"}, {th, tt});
  b.decision(1, "I1", {"H", "T"}, {h, t});
  return b.finish();
}

GameTree two_stage_solo() {
  DraftBuilder b("two_stage_solo", 1);
  const auto ac = b.terminal({2});
  const auto ad = b.terminal({0});
  const auto second = b.decision(1, "I2", {"C", "D"}, {ac, ad});
  const auto out = b.terminal({1});
  b.decision(1, "I1", {"A", "B"}, {second, out});
  return b.finish();
}

GameTree gated_entry() {
  DraftBuilder b("gated_entry", 2);
  const auto out = b.terminal({0, 2});
  const auto fight = b.terminal({-1, -1});
  const auto low = b.terminal({1, 1});
  const auto high = b.terminal({2, -2});
  const auto price = b.decision(1, "I3", {"low", "high"}, {low, high});
  const auto incumbent = b.decision(2, "I2", {"fight", "share"}, {fight, price});
  b.decision(1, "I1", {"out", "in"}, {out, incumbent});
  return b.finish();
}

GameTree battle_of_sexes_seq() {
  DraftBuilder b("battle_of_sexes_seq", 2);
  const auto oo = b.terminal({2, 1});
  const auto of = b.terminal({0, 0});
  const auto fo = b.terminal({0, 0});
  const auto ff = b.terminal({1, 2});
  const auto o = b.decision(2, "I2", {"o", "f"}, {oo, of});
  const auto f = b.decision(2, "I2", {"o", "f"}, {fo, ff});
  b.decision(1, "I1", {"O", "F"}, {o, f});
  return b.finish();
}

GameTree kuhn_poker() {
  DraftBuilder b("kuhn_poker", 2);
  const std::array<std::string, 3> cards = {"J", "Q", "K"};
  std::vector<std::string> deals;
  std::vector<std::string> subtrees;
  for (int c1 = 0; c1 < 3; ++c1) {
    for (int c2 = 0; c2 < 3; ++c2) {
      if (c1 == c2) continue;
      const double win = c1 > c2 ? 1.0 : -1.0;
      const std::string& x = cards[c1];
      const std::string& y = cards[c2];
      // check, check: showdown for the antes.
      const auto pp = b.terminal({win, -win});
      // check, bet, fold / call.
      const auto pbp = b.terminal({-1, 1});
      const auto pbb = b.terminal({2 * win, -2 * win});
      const auto p1_facing = b.decision(1, x + "pb", {"p", "b"}, {pbp, pbb});
      const auto p2_after_check = b.decision(2, y + "p", {"p", "b"}, {pp, p1_facing});
      // bet, fold / call.
      const auto bp = b.terminal({1, -1});
      const auto bb = b.terminal({2 * win, -2 * win});
      const auto p2_facing = b.decision(2, y + "b", {"p", "b"}, {bp, bb});
      subtrees.push_back(b.decision(1, x, {"p", "b"}, {p2_after_check, p2_facing}));
      deals.push_back(x + y);
    }
  }
  b.chance(deals, std::vector<double>(deals.size(), 1.0 / 6.0), subtrees);
  return b.finish();
}

constexpr std::array<std::string_view, 5> kBuiltinNames = {
    "matching_pennies", "two_stage_solo", "gated_entry", "battle_of_sexes_seq", "kuhn_poker"};

}  // namespace

std::span<const std::string_view> builtin_game_names() { return kBuiltinNames; }

GameTree builtin_game(std::string_view name) {
  if (name == "matching_pennies") return matching_pennies();
  if (name == "two_stage_solo") return two_stage_solo();
  if (name == "gated_entry") return gated_entry();
  if (name == "battle_of_sexes_seq") return battle_of_sexes_seq();
  if (name == "kuhn_poker") return kuhn_poker();
  throw std::invalid_argument("unknown builtin game '" + std::string(name) + "'");
}

GameTree resolve_game(const std::string& spec) {
  constexpr std::string_view kPrefix = "builtin:";
  if (spec.rfind(kPrefix, 0) == 0) return builtin_game(spec.substr(kPrefix.size()));
  return load_game_file(spec);
}

}  // namespace fcelab
