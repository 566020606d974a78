#include "nvlang/exhaustive.hpp"

#include <fmt/format.h>

#include <set>

namespace nvlang::types {

namespace {

struct Pat {
  bool wild = true;
  std::string ctor;  // constructor, or literal text for open domains
  std::vector<Pat> args;
};

using Row = std::vector<Pat>;

Pat normalize(const syntax::Pattern& p) {
  using K = syntax::Pattern::Kind;
  Pat out;
  switch (p.kind) {
    case K::Wildcard:
    case K::Var: return out;
    case K::Int: out.ctor = std::to_string(p.intValue); break;
    case K::Float: out.ctor = fmt::format("{}", p.floatValue); break;
    case K::String: out.ctor = "\"" + p.name + "\""; break;
    case K::Bool: out.ctor = p.boolValue ? "true" : "false"; break;
    case K::Unit: out.ctor = "()"; break;
    case K::Nil: out.ctor = "[]"; break;
    case K::Cons: out.ctor = "::"; break;
    case K::Tuple: out.ctor = "(,)"; break;
    case K::Ctor: out.ctor = p.name; break;
  }
  out.wild = false;
  for (const auto& a : p.args) out.args.push_back(normalize(a));
  return out;
}

class Checker {
 public:
  explicit Checker(const SignatureFn& sigs) : sigs_(sigs) {}

  std::optional<std::vector<CtorSig>> signature(const Type& t) const {
    if (auto s = sigs_ ? sigs_(t) : std::nullopt) return s;
    switch (t.kind) {
      case Kind::Bool: return std::vector<CtorSig>{{"true", {}}, {"false", {}}};
      case Kind::Unit: return std::vector<CtorSig>{{"()", {}}};
      case Kind::List: return std::vector<CtorSig>{{"[]", {}}, {"::", {t.args[0], t}}};
      case Kind::Tuple: return std::vector<CtorSig>{{"(,)", t.args}};
      default: return std::nullopt;
    }
  }

  static std::vector<Row> specialize(const std::vector<Row>& rows, const std::string& ctor, std::size_t arity) {
    std::vector<Row> out;
    for (const auto& r : rows) {
      const Pat& h = r[0];
      Row nr;
      if (h.wild) {
        nr.assign(arity, Pat{});
      } else if (h.ctor == ctor) {
        nr = h.args;
        nr.resize(arity);
      } else {
        continue;
      }
      nr.insert(nr.end(), r.begin() + 1, r.end());
      out.push_back(std::move(nr));
    }
    return out;
  }

  static std::vector<Row> defaults(const std::vector<Row>& rows) {
    std::vector<Row> out;
    for (const auto& r : rows) {
      if (r[0].wild) out.emplace_back(r.begin() + 1, r.end());
    }
    return out;
  }

  // A witness row of values not matched by any row, or nullopt.
  std::optional<Row> missing(const std::vector<Row>& rows, const std::vector<Type>& types) const {
    if (types.empty()) return rows.empty() ? std::optional<Row>(Row{}) : std::nullopt;
    std::vector<Type> rest(types.begin() + 1, types.end());
    std::set<std::string> heads;
    for (const auto& r : rows) {
      if (!r[0].wild) heads.insert(r[0].ctor);
    }
    auto sig = signature(types[0]);
    bool complete = sig && !sig->empty() &&
                    std::all_of(sig->begin(), sig->end(), [&](const CtorSig& c) { return heads.count(c.name) > 0; });
    if (complete) {
      for (const auto& c : *sig) {
        std::vector<Type> sub = c.fields;
        sub.insert(sub.end(), rest.begin(), rest.end());
        if (auto w = missing(specialize(rows, c.name, c.fields.size()), sub)) {
          Pat head{false, c.name, Row(w->begin(), w->begin() + static_cast<long>(c.fields.size()))};
          Row out{head};
          out.insert(out.end(), w->begin() + static_cast<long>(c.fields.size()), w->end());
          return out;
        }
      }
      return std::nullopt;
    }
    auto w = missing(defaults(rows), rest);
    if (!w) return std::nullopt;
    Pat head;
    if (sig && !heads.empty()) {
      for (const auto& c : *sig) {
        if (!heads.count(c.name)) {
          head = Pat{false, c.name, Row(c.fields.size())};
          break;
        }
      }
    }
    Row out{head};
    out.insert(out.end(), w->begin(), w->end());
    return out;
  }

 private:
  const SignatureFn& sigs_;
};

std::string render(const Pat& p) {
  if (p.wild) return "_";
  auto args = [&] {
    std::string s;
    for (std::size_t i = 0; i < p.args.size(); ++i) s += (i ? ", " : "") + render(p.args[i]);
    return s;
  };
  if (p.ctor == "(,)") return "(" + args() + ")";
  if (p.ctor == "::") return render(p.args[0]) + " :: " + render(p.args[1]);
  if (p.args.empty()) return p.ctor;
  return p.ctor + "(" + args() + ")";
}

}  // namespace

ExhaustResult checkExhaustive(const SignatureFn& sigs, const Type& scrutinee,
                              const std::vector<const syntax::Pattern*>& patterns) {
  Checker checker(sigs);
  std::vector<Row> rows;
  for (const auto* p : patterns) rows.push_back(Row{normalize(*p)});
  auto witness = checker.missing(rows, {scrutinee});
  if (!witness) return {};
  ExhaustResult res;
  res.exhaustive = false;
  auto sig = checker.signature(scrutinee);
  bool named = sig && (scrutinee.kind == Kind::Named || scrutinee.kind == Kind::Bool || scrutinee.kind == Kind::List);
  if (named) {
    for (const auto& c : *sig) {
      std::vector<Type> sub = c.fields;
      if (checker.missing(Checker::specialize(rows, c.name, c.fields.size()), sub)) res.missing.push_back(c.name);
    }
  }
  if (res.missing.empty()) res.missing.push_back(render((*witness)[0]));
  return res;
}

}  // namespace nvlang::types
