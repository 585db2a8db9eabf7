// SPDX-License-Identifier: Apache-2.0
//
// Tokenizer shared by the .odd spec grammar and the ERLA rule-base files.
#pragma once

#include "oddkit/diagnostic.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oddkit {

enum class TokenKind {
  identifier,  // letter or '_' first, then [A-Za-z0-9_:/+.-]
  string,      // "..." with \" and \\ escapes; text holds the unescaped value
  number,
  lbrace,
  rbrace,
  lbracket,
  rbracket,
  lparen,
  rparen,
  comma,
  colon,
  less_equal,
  end_of_input,
};

struct Token {
  TokenKind kind = TokenKind::end_of_input;
  std::string text;
  double number = 0.0;
  std::size_t line = 0;
  std::size_t column = 0;
};

std::string_view describe(TokenKind kind);

/// Tokenizes the whole input. Lexical errors become E001 diagnostics and
/// the offending character is skipped. `#` starts a comment to end of line.
std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diagnostics);

/// Locale-independent decimal parse of the complete string.
std::optional<double> parse_number(std::string_view text);

/// Shortest round-trip decimal representation.
std::string format_shortest(double value);

/// Up to nine significant digits, used by canonical serializers.
std::string format_canonical(double value);

/// Cursor over a token vector with the small helpers every parser needs.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  [[nodiscard]] const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  [[nodiscard]] bool at(TokenKind kind) const { return peek().kind == kind; }
  [[nodiscard]] bool at_word(std::string_view word) const {
    return at(TokenKind::identifier) && peek().text == word;
  }
  [[nodiscard]] bool done() const { return at(TokenKind::end_of_input); }
  bool accept(TokenKind kind);
  bool accept_word(std::string_view word);

  /// Skips to the first token on a later line than `line`, stopping early
  /// at a closing brace so enclosing blocks can resynchronize.
  void skip_line(std::size_t line);

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace oddkit
