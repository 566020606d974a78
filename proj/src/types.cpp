#include "nvlang/types.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace nvlang::types {

Type Type::fn(std::vector<Type> params, Type result) {
  params.push_back(std::move(result));
  return Type{Kind::Fn, {}, -1, std::move(params)};
}

Type applySubst(const Substitution& s, const Type& t) {
  if (s.empty()) return t;
  if (t.kind == Kind::Var) {
    auto it = s.find(t.var);
    return it == s.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Type out = t;
  for (auto& a : out.args) a = applySubst(s, a);
  return out;
}

Type resolve(const Substitution& s, const Type& t) {
  if (t.kind == Kind::Var) {
    auto it = s.find(t.var);
    if (it == s.end() || (it->second.kind == Kind::Var && it->second.var == t.var)) return t;
    return resolve(s, it->second);
  }
  if (t.args.empty()) return t;
  Type out = t;
  for (auto& a : out.args) a = resolve(s, a);
  return out;
}

Scheme applySubst(const Substitution& s, const Scheme& sc) {
  Substitution inner = s;
  for (int q : sc.quantified) inner.erase(q);
  return Scheme{sc.quantified, applySubst(inner, sc.body)};
}

Substitution compose(const Substitution& s2, const Substitution& s1) {
  Substitution out;
  for (const auto& [v, t] : s1) out[v] = applySubst(s2, t);
  for (const auto& [v, t] : s2) out.emplace(v, t);
  return out;
}

bool occurs(int var, const Type& t) {
  if (t.kind == Kind::Var) return t.var == var;
  return std::any_of(t.args.begin(), t.args.end(), [&](const Type& a) { return occurs(var, a); });
}

void freeVars(const Type& t, std::vector<int>& out) {
  if (t.kind == Kind::Var) {
    if (std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
    return;
  }
  for (const auto& a : t.args) freeVars(a, out);
}

std::vector<int> freeVars(const Type& t) {
  std::vector<int> out;
  freeVars(t, out);
  return out;
}

std::vector<int> freeVars(const Scheme& sc) {
  std::vector<int> out;
  for (int v : freeVars(sc.body)) {
    if (std::find(sc.quantified.begin(), sc.quantified.end(), v) == sc.quantified.end()) out.push_back(v);
  }
  return out;
}

UnifyError::UnifyError(Reason r, Type a, Type b)
    : std::runtime_error([&] {
        TypePrinter p;
        switch (r) {
          case Reason::Occurs: return fmt::format("infinite type: {} occurs in {}", p.print(a), p.print(b));
          case Reason::Arity: return fmt::format("arity mismatch between {} and {}", p.print(a), p.print(b));
          default: return fmt::format("cannot unify {} with {}", p.print(a), p.print(b));
        }
      }()),
      reason(r),
      left(std::move(a)),
      right(std::move(b)) {}

namespace {

void unifyInto(const Type& a0, const Type& b0, Substitution& s) {
  Type a = applySubst(s, a0);
  Type b = applySubst(s, b0);
  if (a.kind == Kind::Var || b.kind == Kind::Var) {
    if (a.kind != Kind::Var) std::swap(a, b);
    if (b.kind == Kind::Var && b.var == a.var) return;
    if (occurs(a.var, b)) throw UnifyError(UnifyError::Reason::Occurs, a, b);
    // Keep the substitution idempotent.
    Substitution single{{a.var, b}};
    for (auto& [v, t] : s) t = applySubst(single, t);
    s.emplace(a.var, b);
    return;
  }
  if (a.kind == Kind::Any || b.kind == Kind::Any) return;
  if ((a.kind == Kind::PidAny && (b.kind == Kind::Pid || b.kind == Kind::PidAny)) ||
      (b.kind == Kind::PidAny && a.kind == Kind::Pid)) {
    return;
  }
  if (a.kind != b.kind) throw UnifyError(UnifyError::Reason::Mismatch, a, b);
  if (a.kind == Kind::Named && a.name != b.name) throw UnifyError(UnifyError::Reason::Mismatch, a, b);
  if (a.args.size() != b.args.size()) {
    throw UnifyError(a.kind == Kind::Named ? UnifyError::Reason::Mismatch : UnifyError::Reason::Arity, a, b);
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) unifyInto(a.args[i], b.args[i], s);
}

}  // namespace

Substitution unify(const Type& a, const Type& b) {
  Substitution s;
  unifyInto(a, b, s);
  return s;
}

Scheme generalize(const std::set<int>& envFree, const Type& t) {
  Scheme sc;
  sc.body = t;
  for (int v : freeVars(t)) {
    if (!envFree.count(v)) sc.quantified.push_back(v);
  }
  return sc;
}

Type instantiate(const Scheme& sc, FreshSupply& fresh) {
  if (sc.quantified.empty()) return sc.body;
  Substitution s;
  for (int q : sc.quantified) s[q] = fresh.fresh();
  return applySubst(s, sc.body);
}

namespace {

bool alphaEq(const Type& a, const Type& b, std::map<int, int>& fwd, std::map<int, int>& back) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  if (a.kind == Kind::Var) {
    auto [f, fnew] = fwd.emplace(a.var, b.var);
    auto [r, rnew] = back.emplace(b.var, a.var);
    return f->second == b.var && r->second == a.var;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!alphaEq(a.args[i], b.args[i], fwd, back)) return false;
  }
  return true;
}

}  // namespace

bool alphaEquivalent(const Type& a, const Type& b) {
  std::map<int, int> fwd, back;
  return alphaEq(a, b, fwd, back);
}

std::string TypePrinter::print(const Type& t) {
  auto all = [&](std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
      if (i > from) out += ", ";
      out += print(t.args[i]);
    }
    return out;
  };
  switch (t.kind) {
    case Kind::Int: return "Int";
    case Kind::Float: return "Float";
    case Kind::Bool: return "Bool";
    case Kind::String: return "String";
    case Kind::Unit: return "Unit";
    case Kind::MonitorRef: return "MonitorRef";
    case Kind::Any: return "Any";
    case Kind::PidAny: return "Pid";
    case Kind::Tuple: return "(" + all(0, t.args.size()) + ")";
    case Kind::List: return "[" + print(t.args[0]) + "]";
    case Kind::Map: return "Map[" + all(0, 2) + "]";
    case Kind::Pid: return "Pid[" + print(t.args[0]) + "]";
    case Kind::Future: return "Future[" + print(t.args[0]) + "]";
    case Kind::Fn: {
      std::string params = all(0, t.args.size() - 1);
      return "fn(" + params + ") -> " + print(t.args.back());
    }
    case Kind::Named: return t.args.empty() ? t.name : t.name + "[" + all(0, t.args.size()) + "]";
    case Kind::Var: {
      auto it = names_.find(t.var);
      if (it != names_.end()) return it->second;
      std::size_t n = names_.size();
      std::string name(1, static_cast<char>('a' + n % 26));
      if (n >= 26) name += std::to_string(n / 26);
      names_.emplace(t.var, name);
      return name;
    }
  }
  return "?";
}

std::string TypePrinter::print(const Scheme& sc) { return print(sc.body); }

std::string typeString(const Type& t) { return TypePrinter().print(t); }
std::string typeString(const Scheme& sc) { return TypePrinter().print(sc); }

}  // namespace nvlang::types
