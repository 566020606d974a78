#include "nvlang/lexer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>

namespace nvlang::syntax {

namespace {

constexpr std::array kKeywords = {
    "fn",    "type",    "actor", "supervisor", "external", "import", "let",   "if",
    "then",  "else",    "case",  "receive",    "loop",     "break",  "reply", "spawn",
    "await", "true",    "false", "not",
};

// Longest first so that maximal munch works with a linear scan.
constexpr std::array<std::string_view, 27> kOperators = {
    "->", "|>", "::", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "+", "-", "*",
    "/",  "%",  "=",  "(",  ")",  "[",  "]",  ",",  ":",  ".", "|", "!", "_",
};

class Lexer {
 public:
  Lexer(std::string_view src, std::uint32_t file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      lexLine();
    }
    // Synthesize the closing NEWLINE and DEDENTs.
    if (lineHasTokens_) {
      push(TokenKind::Newline, "", pos_, pos_);
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenKind::Dedent, "", pos_, pos_);
    }
    return std::move(tokens_);
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw CompileError(ErrorKind::Lex, spanAt(at, at + 1), msg);
  }

  Span spanAt(std::size_t begin, std::size_t end) const {
    Span s;
    s.file = file_;
    s.begin = static_cast<std::uint32_t>(begin);
    s.end = static_cast<std::uint32_t>(std::min(end, src_.size()));
    s.line = line_;
    s.column = static_cast<std::uint32_t>(begin - lineStart_ + 1);
    return s;
  }

  void push(TokenKind kind, std::string lexeme, std::size_t begin, std::size_t end) {
    tokens_.push_back(Token{kind, std::move(lexeme), spanAt(begin, end)});
  }

  // Handles one physical line starting at pos_.
  void lexLine() {
    lineStart_ = pos_;
    std::size_t p = pos_;
    bool sawSpace = false;
    bool sawTab = false;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) {
      (src_[p] == ' ' ? sawSpace : sawTab) = true;
      ++p;
    }
    bool blank = p >= src_.size() || src_[p] == '\n' || src_[p] == '\r' || src_[p] == '#';
    if (!blank && nesting_ == 0) {
      if (sawSpace || sawTab) {
        char used = sawTab ? '\t' : ' ';
        if (sawSpace && sawTab) fail(pos_, "tabs mixed with spaces in indentation");
        if (indentChar_ == 0) indentChar_ = used;
        if (indentChar_ != used) fail(pos_, "tabs mixed with spaces in indentation");
      }
      std::size_t width = p - pos_;
      if (lineHasTokens_) {
        // NEWLINE belongs to the end of the previous logical line.
        push(TokenKind::Newline, "", lastTokenEnd_, lastTokenEnd_);
        lineHasTokens_ = false;
      }
      if (width > indents_.back()) {
        indents_.push_back(width);
        push(TokenKind::Indent, "", p, p);
      } else {
        while (width < indents_.back()) {
          indents_.pop_back();
          push(TokenKind::Dedent, "", p, p);
        }
        if (width != indents_.back()) fail(p, "inconsistent indentation: dedent to a level never opened");
      }
    }
    pos_ = p;
    lexRestOfLine();
  }

  void lexRestOfLine() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        if (nesting_ > 0) {
          lineStart_ = pos_;
          // Continuation lines inside brackets: skip their indentation.
          while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
          continue;
        }
        return;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      lexToken();
    }
  }

  void lexToken() {
    std::size_t start = pos_;
    char c = src_[pos_];
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isdigit(uc)) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      bool isFloat = false;
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        isFloat = true;
        ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
      emit(isFloat ? TokenKind::FloatLiteral : TokenKind::IntLiteral,
           std::string(src_.substr(start, pos_ - start)), start);
      return;
    }
    if (std::isalpha(uc) || (c == '_' && pos_ + 1 < src_.size() && isIdentChar(src_[pos_ + 1]))) {
      while (pos_ < src_.size() && isIdentChar(src_[pos_])) ++pos_;
      std::string word(src_.substr(start, pos_ - start));
      TokenKind kind = TokenKind::Identifier;
      if (isKeyword(word)) {
        kind = TokenKind::Keyword;
      } else if (std::isupper(static_cast<unsigned char>(word[0]))) {
        kind = TokenKind::TypeIdentifier;
      }
      emit(kind, std::move(word), start);
      return;
    }
    if (c == '"') {
      lexString();
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        if (op == "(" || op == "[") ++nesting_;
        if ((op == ")" || op == "]") && nesting_ > 0) --nesting_;
        emit(op == "_" ? TokenKind::Identifier : TokenKind::Operator, std::string(op), start);
        return;
      }
    }
    fail(start, fmt::format("illegal character '{}'", c));
  }

  void lexString() {
    std::size_t start = pos_++;
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail(start, "unterminated string literal");
      char c = src_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail(start, "unterminated string literal");
        char e = src_[pos_++];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '\\': value += '\\'; break;
          case '"': value += '"'; break;
          default: fail(pos_ - 2, fmt::format("unknown escape '\\{}'", e));
        }
        continue;
      }
      value += c;
    }
    emit(TokenKind::StringLiteral, std::move(value), start);
  }

  void emit(TokenKind kind, std::string lexeme, std::size_t start) {
    push(kind, std::move(lexeme), start, pos_);
    lineHasTokens_ = true;
    lastTokenEnd_ = pos_;
  }

  static bool isIdentChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string_view src_;
  std::uint32_t file_;
  std::size_t pos_ = 0;
  std::size_t lineStart_ = 0;
  std::size_t lastTokenEnd_ = 0;
  std::uint32_t line_ = 1;
  int nesting_ = 0;
  bool lineHasTokens_ = false;
  char indentChar_ = 0;
  std::vector<std::size_t> indents_{0};
  std::vector<Token> tokens_;
};

}  // namespace

std::string_view tokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::TypeIdentifier: return "type-identifier";
    case TokenKind::IntLiteral: return "integer";
    case TokenKind::FloatLiteral: return "float";
    case TokenKind::StringLiteral: return "string";
    case TokenKind::Operator: return "operator";
    case TokenKind::Indent: return "INDENT";
    case TokenKind::Dedent: return "DEDENT";
    case TokenKind::Newline: return "NEWLINE";
  }
  return "?";
}

bool isKeyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source, std::uint32_t file) {
  return Lexer(source, file).run();
}

}  // namespace nvlang::syntax
