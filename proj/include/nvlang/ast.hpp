#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nvlang/diagnostics.hpp"

namespace nvlang::syntax {

/// Surface type annotation, e.g. `Option[Int]`, `[String]`, `(Int, a)`,
/// `fn(Int) -> Bool`. Lowercase names are type variables.
struct TypeExpr {
  enum class Kind { Name, Var, List, Tuple, Fn };
  Kind kind = Kind::Name;
  std::string name;
  /// Name: type arguments; List: element; Tuple: members (empty = Unit);
  /// Fn: parameters followed by the result.
  std::vector<TypeExpr> args;
  Span span;
};

struct Pattern {
  enum class Kind { Wildcard, Var, Int, Float, Bool, String, Unit, Ctor, Tuple, Nil, Cons };
  Kind kind = Kind::Wildcard;
  /// Var / Ctor name, String literal value.
  std::string name;
  std::int64_t intValue = 0;
  double floatValue = 0;
  bool boolValue = false;
  /// Ctor fields, Tuple members, Cons head and tail.
  std::vector<Pattern> args;
  Span span;
};

enum class ExprKind {
  IntLit,
  FloatLit,
  BoolLit,
  StringLit,
  UnitLit,
  Var,
  Ctor,
  Call,
  Lambda,
  Let,
  If,
  Case,
  Binary,
  Unary,
  List,
  Tuple,
  Cons,
  Spawn,
  Send,
  Await,
  Reply,
  Receive,
  Loop,
  Break,
  Seq,
  Print,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Arm {
  Pattern pattern;
  ExprPtr body;
};

struct Param {
  std::string name;
  std::optional<TypeExpr> annotation;
  Span span;
};

/// One node type for every expression form; which fields are meaningful
/// depends on `kind`:
///   Var/Ctor/Spawn: text = name;  Binary/Unary: text = operator;
///   Receive: text = binder, annotation = message type;
///   Call: children = callee, args...;  Let: pattern, children = value, body;
///   If: cond, then, else;  Case: children = scrutinee, arms;
///   Lambda: params, children = body;  Send: target, message.
struct Expr {
  ExprKind kind;
  Span span;
  std::int64_t intValue = 0;
  double floatValue = 0;
  bool boolValue = false;
  std::string text;
  std::vector<ExprPtr> children;
  std::vector<Arm> arms;
  std::vector<Param> params;
  std::optional<Pattern> pattern;
  std::optional<TypeExpr> annotation;

  // Written by the type checker.
  bool printsString = false;  // Print: argument is statically a String
  bool floatOp = false;       // Binary arithmetic/comparison on Float
  bool globalRef = false;     // Var: refers to a top-level function/external

  Expr(ExprKind k, Span s) : kind(k), span(s) {}
};

ExprPtr makeExpr(ExprKind kind, Span span);
ExprPtr clone(const Expr& e);

struct Constructor {
  std::string name;
  /// Field names may be empty (`Ok(T)`).
  std::vector<std::pair<std::string, TypeExpr>> fields;
  Span span;
};

struct FnDecl {
  std::string name;
  std::vector<Param> params;
  std::optional<TypeExpr> result;
  ExprPtr body;
};

struct TypeDecl {
  std::string name;
  std::vector<std::string> typeParams;
  std::vector<Constructor> ctors;
};

struct ActorDecl {
  std::string name;
  std::string selfName;
  std::optional<TypeExpr> result;
  ExprPtr runBody;
};

enum class Strategy { OneForOne, OneForAll, RestForOne };
enum class RestartPolicy { Permanent, Transient, Temporary };

std::string_view strategyName(Strategy s);
std::string_view policyName(RestartPolicy p);

struct ChildSpecDecl {
  std::string id;
  std::string actor;
  std::vector<ExprPtr> args;
  RestartPolicy policy = RestartPolicy::Permanent;
  Span span;
};

struct SupervisorDecl {
  std::string name;
  Strategy strategy = Strategy::OneForOne;
  std::vector<ChildSpecDecl> children;
  /// `restarts N within W`; defaulted later when absent.
  std::optional<std::pair<int, int>> restartLimit;
};

struct ExternalDecl {
  std::string name;
  std::vector<TypeExpr> params;
  TypeExpr result;
  std::string module;
  std::string function;
  int arity = 0;
};

struct Decl {
  std::variant<FnDecl, TypeDecl, ActorDecl, SupervisorDecl, ExternalDecl> node;
  Span span;
  /// Owning module (file stem); set by resolve.
  std::string module;

  const std::string& name() const;
};

struct Import {
  std::string name;
  Span span;
};

struct SourceProgram {
  std::vector<Import> imports;
  std::vector<Decl> decls;
};

}  // namespace nvlang::syntax
