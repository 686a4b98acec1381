#include "specsyn/lexer.hpp"

#include <array>
#include <cctype>

#include "specsyn/error.hpp"

namespace specsyn {

namespace {

constexpr std::array<std::string_view, 4> kPunct4 = {"<==>", "<<=", ">>=", "..."};
constexpr std::array<std::string_view, 21> kPunct23 = {
    "==>", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", ".."};
constexpr std::string_view kPunct1 = "{}[]();,:?.+-*/%<>=!~&|^";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool is_c_keyword(std::string_view w) {
  static constexpr std::array<std::string_view, 37> kw = {
      "auto",     "break",   "case",     "char",   "const",    "continue", "default", "do",
      "double",   "else",    "enum",     "extern", "float",    "for",      "goto",    "if",
      "inline",   "int",     "long",     "register", "restrict", "return", "short",   "signed",
      "sizeof",   "static",  "struct",   "switch", "typedef",  "union",    "unsigned", "void",
      "volatile", "while",   "_Bool",    "asm",    "__asm__"};
  for (auto k : kw)
    if (k == w) return true;
  return false;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  bool line_start = true;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
        line_start = true;
      } else {
        ++col;
      }
    }
  };
  auto emit = [&](TokenKind kind, std::size_t len) {
    out.push_back(Token{kind, std::string(src.substr(i, len)), i, line, col});
    line_start = false;
    advance(len);
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#' && line_start) throw ParseError("preprocessor directive in unpreprocessed input", line, col);
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto close = src.find("*/", i + 2);
      if (close == std::string_view::npos) throw ParseError("unterminated comment", line, col);
      bool keep_start = line_start;
      advance(close + 2 - i);
      line_start = keep_start && line_start;
      continue;
    }
    // ACSL: @ signs at line starts inside annotation bodies are layout only.
    if (c == '@') {
      advance(1);
      continue;
    }
    if (c == '\\' && i + 1 < src.size() && ident_start(src[i + 1])) {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      emit(TokenKind::Identifier, j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      emit(TokenKind::Identifier, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool is_float = false;
      if (c == '0' && j + 1 < src.size() && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
        j += 2;
        while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
      } else {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j < src.size() && src[j] == '.' && !(j + 1 < src.size() && src[j + 1] == '.')) {
          is_float = true;
          ++j;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
        if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
          is_float = true;
          ++j;
          if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      while (j < src.size() && std::isalpha(static_cast<unsigned char>(src[j]))) ++j;  // suffixes
      emit(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, j - i);
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c) {
        if (src[j] == '\\') ++j;
        if (j < src.size() && src[j] == '\n') throw ParseError("newline in literal", line, col);
        ++j;
      }
      if (j >= src.size()) throw ParseError("unterminated literal", line, col);
      emit(c == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral, j + 1 - i);
      continue;
    }
    std::string_view rest = src.substr(i);
    bool matched = false;
    for (auto p : kPunct4) {
      if (rest.starts_with(p)) {
        emit(TokenKind::Punct, p.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (auto p : kPunct23) {
      if (rest.starts_with(p)) {
        emit(TokenKind::Punct, p.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kPunct1.find(c) != std::string_view::npos) {
      emit(TokenKind::Punct, 1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back(Token{TokenKind::End, "", src.size(), line, col});
  return out;
}

std::int64_t int_literal_value(const Token& tok) {
  std::string digits;
  for (char c : tok.text) {
    if (c == 'u' || c == 'U' || c == 'l' || c == 'L') break;
    digits.push_back(c);
  }
  int base = 10;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    digits = digits.substr(2);
  } else if (digits.size() > 1 && digits[0] == '0') {
    base = 8;
  }
  try {
    return static_cast<std::int64_t>(std::stoull(digits, nullptr, base));
  } catch (const std::exception&) {
    throw ParseError("integer literal out of range: " + tok.text, tok.line, tok.column);
  }
}

std::int64_t char_literal_value(const Token& tok) {
  const std::string& t = tok.text;
  if (t.size() < 3) throw ParseError("empty character literal", tok.line, tok.column);
  if (t[1] != '\\') return static_cast<unsigned char>(t[1]);
  char e = t[2];
  switch (e) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case '0':
      if (t.size() == 4) return 0;
      return std::stoll(t.substr(2, t.size() - 3), nullptr, 8);
    case '\\': return '\\';
    case '\'': return '\'';
    case '"': return '"';
    case 'x': return std::stoll(t.substr(3, t.size() - 4), nullptr, 16);
    default:
      if (e >= '1' && e <= '7') return std::stoll(t.substr(2, t.size() - 3), nullptr, 8);
      return static_cast<unsigned char>(e);
  }
}

}  // namespace specsyn
