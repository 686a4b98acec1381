#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace specsyn {

enum class TokenKind { Identifier, IntLiteral, FloatLiteral, CharLiteral, StringLiteral, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t offset = 0;  // byte offset of the first character
  std::size_t line = 1;
  std::size_t column = 1;

  std::size_t end() const { return offset + text.size(); }
  bool is(std::string_view punct_or_word) const {
    return (kind == TokenKind::Punct || kind == TokenKind::Identifier) && text == punct_or_word;
  }
};

/// Tokenizes C source or ACSL predicate text. Comments are skipped. ACSL
/// words such as `\result` lex as identifiers; `==>`, `<==>` and `..` lex as
/// punctuators. A `#` at the start of a line raises ParseError because the
/// frontend only accepts preprocessed input.
std::vector<Token> tokenize(std::string_view text);

/// Value of an integer literal token (decimal, hex, octal; suffixes ignored).
std::int64_t int_literal_value(const Token& tok);

/// Value of a character literal token such as `'a'` or `'\n'`.
std::int64_t char_literal_value(const Token& tok);

bool is_c_keyword(std::string_view word);

/// 1-based line/column of a byte offset.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

}  // namespace specsyn
