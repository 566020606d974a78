#pragma once

#include <map>
#include <string>

#include "nvlang/infer.hpp"

namespace nvlang::repr {

/// Unit is represented by this atom.
inline constexpr const char* kUnitAtom = "ok";

/// Constructor -> atom mapping shared by the interpreter and the code
/// generator. Atoms are lowercased constructor names; names that collide
/// after case folding get a numeric suffix in a deterministic order.
class ReprTable {
 public:
  static ReprTable build(const types::TypeEnv& env);

  const std::string& atom(const std::string& ctor) const;
  const std::map<std::string, std::string>& atoms() const { return atoms_; }

 private:
  std::map<std::string, std::string> atoms_;
};

std::string lowerAscii(std::string s);

/// Whether an atom must be written quoted in Erlang term syntax.
bool atomNeedsQuotes(const std::string& atom);

/// `'atom'` with Erlang escapes.
std::string quoteAtom(const std::string& atom);

}  // namespace nvlang::repr
