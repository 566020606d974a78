#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "nvlang/ast.hpp"
#include "nvlang/exhaustive.hpp"
#include "nvlang/types.hpp"

namespace nvlang::types {

struct AdtInfo {
  std::string name;
  std::vector<std::string> params;
  std::vector<int> paramVars;
  std::vector<std::string> ctors;  // declaration order
};

struct CtorInfo {
  std::string name;
  std::string adt;
  std::vector<std::string> fieldNames;
  std::vector<Type> fields;  // over the ADT's paramVars
  int index = 0;
};

/// What `spawn Name()` produces: an actor's message type, or a supervisor.
struct ActorSig {
  std::string name;
  Type messageType;
  bool supervisor = false;
};

struct TypeEnv {
  std::map<std::string, Scheme> globals;  // top-level functions, externals, builtins
  std::map<std::string, AdtInfo> adts;
  std::map<std::string, CtorInfo> ctors;
  std::map<std::string, ActorSig> actors;
  /// Message ADT name -> the single reply type of every handler of it.
  std::map<std::string, Type> replyTypes;

  /// Constructor signature of a Named type instance (for exhaustiveness).
  std::optional<std::vector<CtorSig>> signature(const Type& t) const;
};

struct TypedProgram {
  TypeEnv env;
  /// Fully resolved type of every expression node in the program.
  std::unordered_map<const syntax::Expr*, Type> exprTypes;
  /// Inferred result type of each actor's run body.
  std::map<std::string, Type> actorRunTypes;

  const Type& typeOf(const syntax::Expr& e) const { return exprTypes.at(&e); }
};

/// Type-checks a flattened program. Writes the printsString / floatOp /
/// globalRef annotations into the AST. Throws CompileError.
TypedProgram inferProgram(syntax::SourceProgram& program);

/// Names and ADTs only; used to type standalone expressions in tests.
TypedProgram inferExpression(syntax::SourceProgram& decls, syntax::Expr& expr, Type* result);

}  // namespace nvlang::types
