#include "nvlang/anf.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "nvlang/parser.hpp"

namespace nvlang::anf {

using syntax::Expr;
using syntax::ExprKind;
using syntax::ExprPtr;

namespace {

bool isComparison(const std::string& op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

bool isAtomic(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit:
    case ExprKind::BoolLit:
    case ExprKind::StringLit:
    case ExprKind::UnitLit:
    case ExprKind::Var: return true;
    default: return false;
  }
}

Atom atomOf(const Expr& e) {
  Atom a;
  switch (e.kind) {
    case ExprKind::IntLit: a.kind = Atom::Kind::Int; a.intValue = e.intValue; break;
    case ExprKind::FloatLit: a.kind = Atom::Kind::Float; a.floatValue = e.floatValue; break;
    case ExprKind::BoolLit: a.kind = Atom::Kind::Bool; a.boolValue = e.boolValue; break;
    case ExprKind::StringLit: a.kind = Atom::Kind::String; a.name = e.text; break;
    case ExprKind::UnitLit: a.kind = Atom::Kind::Unit; break;
    case ExprKind::Var:
      a.kind = e.globalRef ? Atom::Kind::Global : Atom::Kind::Var;
      a.name = e.text;
      break;
    default: throw InternalError("atomOf on a non-atomic expression");
  }
  return a;
}

Atom varAtom(std::string name) {
  Atom a;
  a.kind = Atom::Kind::Var;
  a.name = std::move(name);
  return a;
}

AnfPtr makeLet(std::string name, Comp c, AnfPtr body) {
  auto a = std::make_unique<Anf>();
  a->kind = Anf::Kind::Let;
  a->name = std::move(name);
  a->comp = std::move(c);
  a->body = std::move(body);
  return a;
}

AnfPtr makeTail(Comp c) {
  auto a = std::make_unique<Anf>();
  a->comp = std::move(c);
  return a;
}

int maxTempIndex(const Expr& e) {
  int best = 0;
  auto consider = [&](const std::string& n) {
    if (n.rfind("_Anf", 0) == 0 && n.size() > 4 && std::all_of(n.begin() + 4, n.end(), ::isdigit)) {
      best = std::max(best, std::stoi(n.substr(4)));
    }
  };
  if (e.kind == ExprKind::Var) consider(e.text);
  if (e.pattern && e.pattern->kind == syntax::Pattern::Kind::Var) consider(e.pattern->name);
  for (const auto& c : e.children) {
    if (c) best = std::max(best, maxTempIndex(*c));
  }
  for (const auto& a : e.arms) best = std::max(best, maxTempIndex(*a.body));
  return best;
}

class Converter {
 public:
  Converter(OperandOrder order, int start) : order_(order), counter_(start) {}

  AnfPtr tail(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Let: {
        Binds binds;
        if (e.pattern->kind == syntax::Pattern::Kind::Var || e.pattern->kind == syntax::Pattern::Kind::Wildcard) {
          Comp c = comp(*e.children[0], binds);
          std::string name = e.pattern->kind == syntax::Pattern::Kind::Var ? e.pattern->name : "_";
          return wrap(std::move(binds), makeLet(name, std::move(c), tail(*e.children[1])));
        }
        // Irrefutable destructuring becomes a one-arm case.
        Comp c;
        c.op = Op::Case;
        c.args.push_back(atom(*e.children[0], binds));
        c.arms.push_back(AnfArm{*e.pattern, tail(*e.children[1])});
        return wrap(std::move(binds), makeTail(std::move(c)));
      }
      case ExprKind::Seq: return seqFrom(e, 0);
      default: {
        Binds binds;
        Comp c = comp(e, binds);
        return wrap(std::move(binds), makeTail(std::move(c)));
      }
    }
  }

 private:
  using Binds = std::vector<std::pair<std::string, Comp>>;

  AnfPtr seqFrom(const Expr& seq, std::size_t i) {
    if (i + 1 == seq.children.size()) return tail(*seq.children[i]);
    Binds binds;
    Comp c = comp(*seq.children[i], binds);
    return wrap(std::move(binds), makeLet("_", std::move(c), seqFrom(seq, i + 1)));
  }

  static AnfPtr wrap(Binds binds, AnfPtr body) {
    for (auto it = binds.rbegin(); it != binds.rend(); ++it) body = makeLet(it->first, std::move(it->second), std::move(body));
    return body;
  }

  Atom atom(const Expr& e, Binds& binds) {
    if (isAtomic(e)) return atomOf(e);
    Comp c = comp(e, binds);
    std::string name = fmt::format("_Anf{}", ++counter_);
    binds.emplace_back(name, std::move(c));
    return varAtom(name);
  }

  // Operands in evaluation order; results land in source order.
  std::vector<Atom> atoms(const std::vector<ExprPtr>& es, std::size_t from, Binds& binds) {
    std::vector<Atom> out(es.size() - from);
    if (order_ == OperandOrder::LeftToRight) {
      for (std::size_t i = from; i < es.size(); ++i) out[i - from] = atom(*es[i], binds);
    } else {
      for (std::size_t i = es.size(); i-- > from;) out[i - from] = atom(*es[i], binds);
    }
    return out;
  }

  Comp comp(const Expr& e, Binds& binds) {
    Comp c;
    c.text = e.text;
    c.floatOp = e.floatOp;
    c.printsString = e.printsString;
    auto simple = [&](Op op) {
      c.op = op;
      c.args = atoms(e.children, 0, binds);
      return std::move(c);
    };
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::FloatLit:
      case ExprKind::BoolLit:
      case ExprKind::StringLit:
      case ExprKind::UnitLit:
      case ExprKind::Var:
        c.op = Op::Atom;
        c.args.push_back(atomOf(e));
        return c;
      case ExprKind::Call: {
        c.op = Op::Call;
        if (order_ == OperandOrder::LeftToRight) {
          c.args.push_back(atom(*e.children[0], binds));
          for (auto& a : atoms(e.children, 1, binds)) c.args.push_back(std::move(a));
        } else {
          auto args = atoms(e.children, 1, binds);
          c.args.push_back(atom(*e.children[0], binds));
          for (auto& a : args) c.args.push_back(std::move(a));
        }
        return c;
      }
      case ExprKind::Ctor: return simple(Op::Ctor);
      case ExprKind::Binary:
        if (e.text == "&&" || e.text == "||") {
          // Short-circuit: the right operand only runs in one branch.
          c.op = Op::If;
          c.text.clear();
          c.args.push_back(atom(*e.children[0], binds));
          Comp lit;
          lit.op = Op::Atom;
          Atom b;
          b.kind = Atom::Kind::Bool;
          b.boolValue = e.text == "||";
          lit.args.push_back(b);
          if (e.text == "&&") {
            c.body = tail(*e.children[1]);
            c.elseBody = makeTail(std::move(lit));
          } else {
            c.body = makeTail(std::move(lit));
            c.elseBody = tail(*e.children[1]);
          }
          return c;
        }
        return simple(Op::Binary);
      case ExprKind::Unary: return simple(Op::Unary);
      case ExprKind::Tuple: return simple(Op::Tuple);
      case ExprKind::List: return simple(Op::List);
      case ExprKind::Cons: return simple(Op::Cons);
      case ExprKind::Spawn: return simple(Op::Spawn);
      case ExprKind::Send: return simple(Op::Send);
      case ExprKind::Await: return simple(Op::Await);
      case ExprKind::Reply: return simple(Op::Reply);
      case ExprKind::Print: return simple(Op::Print);
      case ExprKind::Break: c.op = Op::Break; return c;
      case ExprKind::Lambda:
        c.op = Op::Lambda;
        for (const auto& p : e.params) c.params.push_back(p.name);
        c.body = tail(*e.children[0]);
        return c;
      case ExprKind::If:
        c.op = Op::If;
        c.args.push_back(atom(*e.children[0], binds));
        c.body = tail(*e.children[1]);
        c.elseBody = tail(*e.children[2]);
        return c;
      case ExprKind::Case:
        c.op = Op::Case;
        c.args.push_back(atom(*e.children[0], binds));
        for (const auto& a : e.arms) c.arms.push_back(AnfArm{a.pattern, tail(*a.body)});
        return c;
      case ExprKind::Receive:
        c.op = Op::Receive;
        c.typeName = e.annotation ? e.annotation->name : "";
        for (const auto& a : e.arms) c.arms.push_back(AnfArm{a.pattern, tail(*a.body)});
        return c;
      case ExprKind::Loop:
        c.op = Op::Loop;
        c.body = tail(*e.children[0]);
        return c;
      case ExprKind::Let:
      case ExprKind::Seq:
        c.op = Op::Block;
        c.text.clear();
        c.body = tail(e);
        return c;
    }
    throw InternalError("unhandled expression in ANF conversion");
  }

  OperandOrder order_;
  int counter_;
};

void guardComp(Comp& c);

AnfPtr guardAnf(AnfPtr e) {
  guardComp(e->comp);
  if (e->body) e->body = guardAnf(std::move(e->body));
  if (e->kind == Anf::Kind::Let && e->comp.op == Op::Binary && isComparison(e->comp.text) &&
      e->name.rfind("_Anf", 0) == 0) {
    Comp& next = e->body->comp;
    if (next.op == Op::If && !next.guard && next.args.size() == 1 && next.args[0].kind == Atom::Kind::Var &&
        next.args[0].name == e->name) {
      next.guard = Guard{e->comp.text, e->comp.args[0], e->comp.args[1], e->comp.floatOp};
      next.args.clear();
      return std::move(e->body);
    }
  }
  return e;
}

void guardComp(Comp& c) {
  if (c.body) c.body = guardAnf(std::move(c.body));
  if (c.elseBody) c.elseBody = guardAnf(std::move(c.elseBody));
  for (auto& a : c.arms) a.body = guardAnf(std::move(a.body));
}

ExprPtr lowerAtom(const Atom& a) {
  ExprPtr e;
  switch (a.kind) {
    case Atom::Kind::Var:
    case Atom::Kind::Global:
      e = syntax::makeExpr(ExprKind::Var, Span{});
      e->text = a.name;
      e->globalRef = a.kind == Atom::Kind::Global;
      break;
    case Atom::Kind::Int: e = syntax::makeExpr(ExprKind::IntLit, Span{}); e->intValue = a.intValue; break;
    case Atom::Kind::Float: e = syntax::makeExpr(ExprKind::FloatLit, Span{}); e->floatValue = a.floatValue; break;
    case Atom::Kind::Bool: e = syntax::makeExpr(ExprKind::BoolLit, Span{}); e->boolValue = a.boolValue; break;
    case Atom::Kind::String: e = syntax::makeExpr(ExprKind::StringLit, Span{}); e->text = a.name; break;
    case Atom::Kind::Unit: e = syntax::makeExpr(ExprKind::UnitLit, Span{}); break;
  }
  return e;
}

ExprPtr lowerComp(const Comp& c) {
  auto node = [&](ExprKind k) {
    auto e = syntax::makeExpr(k, Span{});
    e->text = c.text;
    e->floatOp = c.floatOp;
    e->printsString = c.printsString;
    for (const auto& a : c.args) e->children.push_back(lowerAtom(a));
    return e;
  };
  switch (c.op) {
    case Op::Atom: return lowerAtom(c.args[0]);
    case Op::Call: return node(ExprKind::Call);
    case Op::Ctor: return node(ExprKind::Ctor);
    case Op::Binary: return node(ExprKind::Binary);
    case Op::Unary: return node(ExprKind::Unary);
    case Op::Tuple: return node(ExprKind::Tuple);
    case Op::List: return node(ExprKind::List);
    case Op::Cons: return node(ExprKind::Cons);
    case Op::Spawn: return node(ExprKind::Spawn);
    case Op::Send: return node(ExprKind::Send);
    case Op::Await: return node(ExprKind::Await);
    case Op::Reply: return node(ExprKind::Reply);
    case Op::Print: return node(ExprKind::Print);
    case Op::Break: return node(ExprKind::Break);
    case Op::Lambda: {
      auto e = syntax::makeExpr(ExprKind::Lambda, Span{});
      for (const auto& p : c.params) e->params.push_back(syntax::Param{p, std::nullopt, Span{}});
      e->children.push_back(lowerToExpr(*c.body));
      return e;
    }
    case Op::If: {
      auto e = syntax::makeExpr(ExprKind::If, Span{});
      if (c.guard) {
        auto cond = syntax::makeExpr(ExprKind::Binary, Span{});
        cond->text = c.guard->op;
        cond->floatOp = c.guard->floatOp;
        cond->children.push_back(lowerAtom(c.guard->lhs));
        cond->children.push_back(lowerAtom(c.guard->rhs));
        e->children.push_back(std::move(cond));
      } else {
        e->children.push_back(lowerAtom(c.args[0]));
      }
      e->children.push_back(lowerToExpr(*c.body));
      e->children.push_back(lowerToExpr(*c.elseBody));
      return e;
    }
    case Op::Case:
    case Op::Receive: {
      auto e = syntax::makeExpr(c.op == Op::Case ? ExprKind::Case : ExprKind::Receive, Span{});
      if (c.op == Op::Case) {
        e->children.push_back(lowerAtom(c.args[0]));
      } else {
        e->text = c.text;
        syntax::TypeExpr t;
        t.name = c.typeName;
        e->annotation = t;
      }
      for (const auto& a : c.arms) e->arms.push_back(syntax::Arm{a.pattern, lowerToExpr(*a.body)});
      return e;
    }
    case Op::Block: return lowerToExpr(*c.body);
    case Op::Loop: {
      auto e = syntax::makeExpr(ExprKind::Loop, Span{});
      e->children.push_back(lowerToExpr(*c.body));
      return e;
    }
  }
  throw InternalError("unhandled ANF computation");
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out + "\"";
}

std::string indent(const std::string& s, const std::string& pad) {
  std::string out = pad;
  for (char ch : s) {
    out += ch;
    if (ch == '\n') out += pad;
  }
  return out;
}

std::string joinAtoms(const std::vector<Atom>& as, std::size_t from = 0) {
  std::string out;
  for (std::size_t i = from; i < as.size(); ++i) out += (i > from ? ", " : "") + toString(as[i]);
  return out;
}

std::string nested(const Anf& body) { return "{\n" + indent(toString(body), "  ") + "\n}"; }

}  // namespace

AnfPtr toAnf(const Expr& e, OperandOrder order) { return Converter(order, maxTempIndex(e)).tail(e); }

AnfPtr markGuards(AnfPtr e) { return guardAnf(std::move(e)); }

ExprPtr lowerToExpr(const Anf& e) {
  if (e.kind == Anf::Kind::Tail) return lowerComp(e.comp);
  auto let = syntax::makeExpr(ExprKind::Let, Span{});
  syntax::Pattern p;
  if (e.name != "_") {
    p.kind = syntax::Pattern::Kind::Var;
    p.name = e.name;
  }
  let->pattern = p;
  let->children.push_back(lowerComp(e.comp));
  let->children.push_back(lowerToExpr(*e.body));
  return let;
}

std::string toString(const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::Var:
    case Atom::Kind::Global: return a.name;
    case Atom::Kind::Int: return std::to_string(a.intValue);
    case Atom::Kind::Float: {
      std::string s = fmt::format("{}", a.floatValue);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case Atom::Kind::Bool: return a.boolValue ? "true" : "false";
    case Atom::Kind::String: return quote(a.name);
    case Atom::Kind::Unit: return "()";
  }
  return "";
}

std::string toString(const Comp& c) {
  switch (c.op) {
    case Op::Atom: return toString(c.args[0]);
    case Op::Call: return toString(c.args[0]) + "(" + joinAtoms(c.args, 1) + ")";
    case Op::Ctor: return c.args.empty() ? c.text : c.text + "(" + joinAtoms(c.args) + ")";
    case Op::Binary: return toString(c.args[0]) + " " + c.text + " " + toString(c.args[1]);
    case Op::Unary: return (c.text == "not" ? "not " : c.text) + toString(c.args[0]);
    case Op::Tuple: return "(" + joinAtoms(c.args) + ")";
    case Op::List: return "[" + joinAtoms(c.args) + "]";
    case Op::Cons: return toString(c.args[0]) + " :: " + toString(c.args[1]);
    case Op::Spawn: return "spawn " + c.text + "(" + joinAtoms(c.args) + ")";
    case Op::Send: return toString(c.args[0]) + " ! " + toString(c.args[1]);
    case Op::Await: return "await " + toString(c.args[0]);
    case Op::Reply: return "reply " + toString(c.args[0]);
    case Op::Print: return "print(" + toString(c.args[0]) + ")";
    case Op::Break: return "break";
    case Op::Lambda: {
      std::string ps;
      for (const auto& p : c.params) ps += (ps.empty() ? "" : ", ") + p;
      return "fn(" + ps + ") -> " + nested(*c.body);
    }
    case Op::If: {
      std::string cond = c.guard ? toString(c.guard->lhs) + " " + c.guard->op + " " + toString(c.guard->rhs)
                                 : toString(c.args[0]);
      return (c.guard ? "if guard " : "if ") + cond + " then " + nested(*c.body) + " else " + nested(*c.elseBody);
    }
    case Op::Case:
    case Op::Receive: {
      std::string out = c.op == Op::Case ? "case " + toString(c.args[0]) + " of {\n"
                                         : "receive " + c.text + ": " + c.typeName + " {\n";
      for (const auto& a : c.arms) {
        out += indent(syntax::prettyPrint(a.pattern) + " -> " + nested(*a.body), "  ") + "\n";
      }
      return out + "}";
    }
    case Op::Block: return nested(*c.body);
    case Op::Loop: return "loop " + nested(*c.body);
  }
  return "";
}

std::string toString(const Anf& e) {
  if (e.kind == Anf::Kind::Tail) return toString(e.comp);
  return "let " + e.name + " = " + toString(e.comp) + " in\n" + toString(*e.body);
}

int nonAtomicOperands(const Expr& e) {
  int count = 0;
  switch (e.kind) {
    case ExprKind::Call:
    case ExprKind::Ctor:
    case ExprKind::Binary:
    case ExprKind::Unary:
    case ExprKind::Tuple:
    case ExprKind::List:
    case ExprKind::Cons:
    case ExprKind::Spawn:
    case ExprKind::Send:
    case ExprKind::Await:
    case ExprKind::Reply:
    case ExprKind::Print:
      for (const auto& c : e.children) count += isAtomic(*c) ? 0 : 1;
      break;
    case ExprKind::If:
    case ExprKind::Case: {
      const Expr& head = *e.children[0];
      bool guard = e.kind == ExprKind::If && head.kind == ExprKind::Binary && isComparison(head.text) &&
                   isAtomic(*head.children[0]) && isAtomic(*head.children[1]);
      if (!isAtomic(head) && !guard) ++count;
      break;
    }
    default: break;
  }
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    // A guard's comparison is checked through its own operands.
    if (e.children[i]) count += nonAtomicOperands(*e.children[i]);
  }
  for (const auto& a : e.arms) count += nonAtomicOperands(*a.body);
  return count;
}

std::vector<AnfFunction> toAnf(const syntax::SourceProgram& program, OperandOrder order) {
  std::vector<AnfFunction> out;
  for (const auto& d : program.decls) {
    if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
      AnfFunction fn{f->name, {}, markGuards(toAnf(*f->body, order)), false, ""};
      for (const auto& p : f->params) fn.params.push_back(p.name);
      out.push_back(std::move(fn));
    } else if (const auto* a = std::get_if<syntax::ActorDecl>(&d.node)) {
      out.push_back(AnfFunction{a->name, {a->selfName}, markGuards(toAnf(*a->runBody, order)), true, a->selfName});
    }
  }
  return out;
}

}  // namespace nvlang::anf
