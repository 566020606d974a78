#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nvlang/ast.hpp"

namespace nvlang::anf {

struct Atom {
  enum class Kind { Var, Global, Int, Float, Bool, String, Unit };
  Kind kind = Kind::Unit;
  std::string name;  // Var / Global name, String value
  std::int64_t intValue = 0;
  double floatValue = 0;
  bool boolValue = false;
};

struct Anf;
using AnfPtr = std::unique_ptr<Anf>;

struct AnfArm {
  syntax::Pattern pattern;
  AnfPtr body;
};

enum class Op {
  Atom,
  Call,     // args = callee, arguments...
  Ctor,     // text = constructor
  Binary,   // text = operator
  Unary,
  Tuple,
  List,
  Cons,
  Lambda,   // params, body
  If,       // args = condition (absent when guard is set), body = then, elseBody
  Case,     // args = scrutinee, arms
  Block,    // body evaluated in place (a let/seq block in value position)
  Spawn,    // text = actor, args
  Send,     // args = target, message
  Await,
  Reply,
  Receive,  // text = binder, typeName = message ADT, arms
  Loop,     // body
  Break,
  Print,
};

/// Comparison condition of an if, emitted as a guard.
struct Guard {
  std::string op;
  Atom lhs, rhs;
  bool floatOp = false;
};

struct Comp {
  Op op = Op::Atom;
  std::string text;
  std::string typeName;
  std::vector<Atom> args;
  std::vector<AnfArm> arms;
  std::vector<std::string> params;
  AnfPtr body, elseBody;
  std::optional<Guard> guard;
  bool floatOp = false;
  bool printsString = false;
};

/// `let name = comp in body`, or `comp` in tail position. A Let named "_"
/// discards its value.
struct Anf {
  enum class Kind { Let, Tail };
  Kind kind = Kind::Tail;
  std::string name;
  Comp comp;
  AnfPtr body;
};

enum class OperandOrder { LeftToRight, RightToLeft };

/// Hoists every non-atomic operand into an `_AnfN` temporary. Branches of
/// if/case/receive stay local to their branch.
AnfPtr toAnf(const syntax::Expr& e, OperandOrder order = OperandOrder::LeftToRight);

/// Rewrites `let t = a <op> b in if t ...` (t used once) into a guarded if.
AnfPtr markGuards(AnfPtr e);

/// Back to the surface AST, e.g. to run through the interpreter.
syntax::ExprPtr lowerToExpr(const Anf& e);

/// `let _Anf1 = y + z in` lines followed by the tail computation.
std::string toString(const Anf& e);
std::string toString(const Comp& c);
std::string toString(const Atom& a);

/// Operand positions (call/ctor/operator/send/tuple/list arguments) of an
/// expression tree that hold something other than a variable or literal.
int nonAtomicOperands(const syntax::Expr& e);

/// Whole-program form: one ANF body per function / actor run.
struct AnfFunction {
  std::string name;
  std::vector<std::string> params;
  AnfPtr body;
  bool isActor = false;
  std::string selfName;
};

std::vector<AnfFunction> toAnf(const syntax::SourceProgram& program, OperandOrder order = OperandOrder::LeftToRight);

}  // namespace nvlang::anf
