#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nvlang/diagnostics.hpp"

namespace nvlang::syntax {

enum class TokenKind {
  Keyword,
  Identifier,
  TypeIdentifier,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  Operator,
  Indent,
  Dedent,
  Newline,
};

std::string_view tokenKindName(TokenKind kind);

struct Token {
  TokenKind kind;
  /// Source text, except for string literals where escapes are already decoded.
  std::string lexeme;
  Span span;

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool isOp(std::string_view text) const { return is(TokenKind::Operator, text); }
  bool isKeyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
};

bool isKeyword(std::string_view word);

/// Splits indentation-structured source into tokens. Comments run from `#`
/// to end of line. Newlines inside (), [] are not significant.
/// Throws CompileError(ErrorKind::Lex).
std::vector<Token> tokenize(std::string_view source, std::uint32_t file = 0);

}  // namespace nvlang::syntax
