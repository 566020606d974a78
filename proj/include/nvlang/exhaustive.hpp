#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nvlang/ast.hpp"
#include "nvlang/types.hpp"

namespace nvlang::types {

struct CtorSig {
  std::string name;
  std::vector<Type> fields;
};

/// Complete constructor set of a type, or nullopt for open domains
/// (Int, Float, String, variables, ...).
using SignatureFn = std::function<std::optional<std::vector<CtorSig>>(const Type&)>;

struct ExhaustResult {
  bool exhaustive = true;
  /// Uncovered top-level constructor names, or one rendered example value
  /// when the scrutinee has no named constructors.
  std::vector<std::string> missing;
};

/// Usefulness-based check: the match is exhaustive iff a wildcard row is not
/// useful after all patterns. Bool, lists, tuples and Unit get built-in
/// signatures; `sigs` is consulted first.
ExhaustResult checkExhaustive(const SignatureFn& sigs, const Type& scrutinee,
                              const std::vector<const syntax::Pattern*>& patterns);

}  // namespace nvlang::types
