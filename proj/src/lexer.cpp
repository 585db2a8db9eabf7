// SPDX-License-Identifier: Apache-2.0
#include "oddkit/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace oddkit {

std::string format(const Diagnostic& d, std::string_view origin) {
  std::string out(origin);
  out += ':' + std::to_string(d.location.line) + ':' + std::to_string(d.location.column) + ": ";
  out += d.severity == Severity::error ? "error " : "warning ";
  out += d.code + ": " + d.message;
  return out;
}

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::string: return "string";
    case TokenKind::number: return "number";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::lbracket: return "'['";
    case TokenKind::rbracket: return "']'";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::comma: return "','";
    case TokenKind::colon: return "':'";
    case TokenKind::less_equal: return "'<='";
    case TokenKind::end_of_input: return "end of input";
  }
  return "?";
}

std::optional<double> parse_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                         std::chars_format::general);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::string format_shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_canonical(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '/' ||
         c == '+' || c == '.' || c == '-';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diagnostics) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto error = [&](std::size_t l, std::size_t c, std::string msg) {
    diagnostics.push_back({Severity::error, "E001", std::move(msg), {l, c, l, c}});
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    const auto single = [&](TokenKind k) {
      tok.kind = k;
      tok.text = std::string(1, c);
      advance(1);
    };
    switch (c) {
      case '{': single(TokenKind::lbrace); break;
      case '}': single(TokenKind::rbrace); break;
      case '[': single(TokenKind::lbracket); break;
      case ']': single(TokenKind::rbracket); break;
      case '(': single(TokenKind::lparen); break;
      case ')': single(TokenKind::rparen); break;
      case ',': single(TokenKind::comma); break;
      case ':': single(TokenKind::colon); break;
      default: break;
    }
    if (!tok.text.empty()) {
      out.push_back(std::move(tok));
      continue;
    }
    if (c == '<' && i + 1 < text.size() && text[i + 1] == '=') {
      tok.kind = TokenKind::less_equal;
      tok.text = "<=";
      advance(2);
      out.push_back(std::move(tok));
      continue;
    }
    if (c == '"') {
      advance(1);
      std::string value;
      bool closed = false;
      while (i < text.size() && text[i] != '\n') {
        if (text[i] == '"') {
          closed = true;
          advance(1);
          break;
        }
        if (text[i] == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
          value += text[i + 1];
          advance(2);
          continue;
        }
        value += text[i];
        advance(1);
      }
      if (!closed) {
        error(tok.line, tok.column, "unterminated string");
        continue;
      }
      tok.kind = TokenKind::string;
      tok.text = std::move(value);
      out.push_back(std::move(tok));
      continue;
    }
    const bool signed_number = (c == '-' || c == '+') && i + 1 < text.size() &&
                               (digit(text[i + 1]) || text[i + 1] == '.');
    if (digit(c) || c == '.' || signed_number) {
      std::size_t j = i + (signed_number ? 1 : 0);
      while (j < text.size() && digit(text[j])) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && digit(text[k])) {
          j = k;
          while (j < text.size() && digit(text[j])) ++j;
        }
      }
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      if (const auto v = parse_number(tok.text)) {
        tok.kind = TokenKind::number;
        tok.number = *v;
        out.push_back(std::move(tok));
      } else {
        error(tok.line, tok.column, "malformed number '" + tok.text + "'");
      }
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = TokenKind::identifier;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    error(line, col, std::string("unexpected character '") + c + "'");
    advance(1);
  }
  Token end;
  end.kind = TokenKind::end_of_input;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  const std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[k];
}

const Token& TokenCursor::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenCursor::accept(TokenKind kind) {
  if (!at(kind)) return false;
  next();
  return true;
}

bool TokenCursor::accept_word(std::string_view word) {
  if (!at_word(word)) return false;
  next();
  return true;
}

void TokenCursor::skip_line(std::size_t line) {
  while (!done() && peek().line <= line && !at(TokenKind::rbrace)) next();
}

}  // namespace oddkit
