#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvlang::types {

enum class Kind { Int, Float, Bool, String, Unit, Tuple, List, Map, Fn, Named, Var, Pid, PidAny, Future, MonitorRef, Any };

/// Value-semantics type term. Fn stores its parameters followed by the
/// result in `args`.
struct Type {
  Kind kind = Kind::Unit;
  std::string name;  // Named
  int var = -1;      // Var
  std::vector<Type> args;

  static Type prim(Kind k) { return Type{k, {}, -1, {}}; }
  static Type makeVar(int id) { return Type{Kind::Var, {}, id, {}}; }
  static Type tuple(std::vector<Type> members) { return Type{Kind::Tuple, {}, -1, std::move(members)}; }
  static Type list(Type elem) { return Type{Kind::List, {}, -1, {std::move(elem)}}; }
  static Type map(Type k, Type v) { return Type{Kind::Map, {}, -1, {std::move(k), std::move(v)}}; }
  static Type fn(std::vector<Type> params, Type result);
  static Type named(std::string n, std::vector<Type> a = {}) { return Type{Kind::Named, std::move(n), -1, std::move(a)}; }
  static Type pid(Type msg) { return Type{Kind::Pid, {}, -1, {std::move(msg)}}; }
  static Type future(Type t) { return Type{Kind::Future, {}, -1, {std::move(t)}}; }

  bool is(Kind k) const { return kind == k; }
  std::size_t arity() const { return kind == Kind::Fn ? args.size() - 1 : 0; }
  const Type& result() const { return args.back(); }

  friend bool operator==(const Type&, const Type&) = default;
};

struct Scheme {
  std::vector<int> quantified;
  Type body;
};

using Substitution = std::map<int, Type>;

/// Homomorphic replacement of mapped variables (one pass).
Type applySubst(const Substitution& s, const Type& t);
/// Like applySubst but follows chains, for triangular substitutions built
/// up incrementally. `s` must not be self-referential.
Type resolve(const Substitution& s, const Type& t);
Scheme applySubst(const Substitution& s, const Scheme& sc);

/// compose(s2, s1) applied to t equals applySubst(s2, applySubst(s1, t)).
Substitution compose(const Substitution& s2, const Substitution& s1);

bool occurs(int var, const Type& t);

/// Free variables in first-occurrence order (left to right).
std::vector<int> freeVars(const Type& t);
void freeVars(const Type& t, std::vector<int>& out);
std::vector<int> freeVars(const Scheme& sc);

class UnifyError : public std::runtime_error {
 public:
  enum class Reason { Mismatch, Occurs, Arity };
  UnifyError(Reason r, Type a, Type b);
  Reason reason;
  Type left;
  Type right;
};

/// Most general unifier. PidAny ~ Pid[t] and Any ~ t yield no bindings.
Substitution unify(const Type& a, const Type& b);

class FreshSupply {
 public:
  Type fresh() { return Type::makeVar(next_++); }
  int peek() const { return next_; }

 private:
  int next_ = 0;
};

Scheme generalize(const std::set<int>& envFree, const Type& t);
Type instantiate(const Scheme& sc, FreshSupply& fresh);

/// Equal up to a consistent bijective renaming of variables.
bool alphaEquivalent(const Type& a, const Type& b);

/// Surface-syntax rendering; variables print as a, b, c, ... in order of
/// first appearance across every type rendered by one printer.
class TypePrinter {
 public:
  std::string print(const Type& t);
  std::string print(const Scheme& sc);

 private:
  std::map<int, std::string> names_;
};

std::string typeString(const Type& t);
std::string typeString(const Scheme& sc);

}  // namespace nvlang::types
