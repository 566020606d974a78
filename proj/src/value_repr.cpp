#include "nvlang/value_repr.hpp"

#include <set>

namespace nvlang::repr {

std::string lowerAscii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

ReprTable ReprTable::build(const types::TypeEnv& env) {
  ReprTable t;
  std::set<std::string> used{kUnitAtom, "true", "false", "response", "future"};
  for (const auto& [name, adt] : env.adts) {
    for (const auto& c : adt.ctors) {
      std::string base = lowerAscii(c);
      std::string atom = base;
      for (int n = 2; used.count(atom); ++n) atom = base + "_" + std::to_string(n);
      used.insert(atom);
      t.atoms_[c] = atom;
    }
  }
  return t;
}

const std::string& ReprTable::atom(const std::string& ctor) const {
  auto it = atoms_.find(ctor);
  if (it == atoms_.end()) throw InternalError("no atom for constructor " + ctor);
  return it->second;
}

bool atomNeedsQuotes(const std::string& atom) {
  static const std::set<std::string> reserved{
      "after", "and", "andalso", "band", "begin", "bnot", "bor", "bsl", "bsr", "bxor", "case", "catch", "cond",
      "div", "else", "end", "fun", "if", "let", "maybe", "not", "of", "or", "orelse", "receive", "rem", "try",
      "when", "xor"};
  if (atom.empty() || !(atom[0] >= 'a' && atom[0] <= 'z')) return true;
  for (char c : atom) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '@';
    if (!ok) return true;
  }
  return reserved.count(atom) > 0;
}

std::string quoteAtom(const std::string& atom) {
  std::string out = "'";
  for (char c : atom) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

}  // namespace nvlang::repr
