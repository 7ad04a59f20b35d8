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

#ifndef FCELAB_GAME_IO_HPP_
#define FCELAB_GAME_IO_HPP_

// Text format for extensive-form games. Line-oriented, `#` to end of line is
// a comment, players are numbered from 1:
//
//   game <name> players <N>
//   node <id> player <p> infoset <label> { <action> -> <child>, ... }
//   node <id> chance { <action> : <prob> -> <child>, ... }
//   node <id> terminal { <payoff-1>, ..., <payoff-N> }
//
// The first node record is the root. Probabilities and payoffs accept
// decimals or p/q fractions. Infoset labels are scoped per player.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcelab/errors.hpp"
#include "fcelab/game_model.hpp"

namespace fcelab {

enum class ParseCode {
  kSyntax,
  kUnknownChild,
  kStructure,
  kInfosetMismatch,
  kProbabilitySum,
  kRecallViolation,
};

std::string_view to_string(ParseCode code);

class ParseError : public Error {
 public:
  ParseError(ParseCode code, int line, int column, const std::string& message)
      : Error(message), code_(code), line_(line), column_(column) {}
  ParseCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }
  // `file:line:col: code: message`
  std::string diagnostic(std::string_view file) const;

 private:
  ParseCode code_;
  int line_;
  int column_;
};

// Syntax only; no structural checks.
GameDraft parse_game_draft(std::string_view text);
// Parses, checks structure and perfect recall. Throws ParseError.
GameTree parse_game(std::string_view text);
GameTree load_game_file(const std::string& path);

std::string serialize_game(const GameTree& game);

// A finite decimal or p/q fraction, as accepted for probabilities and payoffs.
std::optional<double> parse_game_number(std::string_view word);

// matching_pennies, two_stage_solo, gated_entry, battle_of_sexes_seq,
// kuhn_poker. Throws std::invalid_argument for any other name.
GameTree builtin_game(std::string_view name);
std::span<const std::string_view> builtin_game_names();

// "builtin:<name>" or a file path.
GameTree resolve_game(const std::string& spec);

}  // namespace fcelab

#endif  // FCELAB_GAME_IO_HPP_
