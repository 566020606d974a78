#pragma once

#include <span>
#include <string>
#include <string_view>

#include "nvlang/ast.hpp"
#include "nvlang/lexer.hpp"

namespace nvlang::syntax {

/// Builds the untyped AST. Precedence, loosest first: `|>`, `!`, `||`, `&&`,
/// comparisons, `::` (right-assoc), `+ -`, `* / %`, unary, application.
/// `x |> f` becomes `f(x)` and `x |> await` becomes `await x`.
/// Throws CompileError(ErrorKind::Parse) on the first error.
SourceProgram parse(std::span<const Token> tokens);

/// tokenize + parse.
SourceProgram parseSource(std::string_view source, std::uint32_t file = 0);

/// Re-parseable NVLang source for a program.
std::string prettyPrint(const SourceProgram& program);
std::string prettyPrint(const Expr& expr);
std::string prettyPrint(const TypeExpr& type);
std::string prettyPrint(const Pattern& pattern);

/// Span-free S-expression dump; two ASTs are equal up to spans iff their
/// dumps are equal.
std::string dump(const SourceProgram& program);
std::string dump(const Expr& expr);

}  // namespace nvlang::syntax
