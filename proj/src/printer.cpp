#include <fmt/format.h>

#include "nvlang/parser.hpp"

namespace nvlang::syntax {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out += c;
    }
  }
  return out + '"';
}

std::string floatText(double v) {
  std::string s = fmt::format("{}", v);
  if (s.find_first_of("einf") != std::string::npos) s = fmt::format("{:.20f}", v);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += f(items[i]);
  }
  return out;
}

std::string typeText(const TypeExpr& t) {
  auto rec = [](const TypeExpr& a) { return typeText(a); };
  switch (t.kind) {
    case TypeExpr::Kind::Name:
      return t.args.empty() ? t.name : fmt::format("{}[{}]", t.name, join(t.args, rec));
    case TypeExpr::Kind::Var: return t.name;
    case TypeExpr::Kind::List: return fmt::format("[{}]", typeText(t.args.at(0)));
    case TypeExpr::Kind::Tuple: return fmt::format("({})", join(t.args, rec));
    case TypeExpr::Kind::Fn: {
      std::vector<TypeExpr> params(t.args.begin(), t.args.end() - 1);
      return fmt::format("fn({}) -> {}", join(params, rec), typeText(t.args.back()));
    }
  }
  return "?";
}

std::string patternText(const Pattern& p) {
  auto rec = [](const Pattern& a) { return patternText(a); };
  switch (p.kind) {
    case Pattern::Kind::Wildcard: return "_";
    case Pattern::Kind::Var: return p.name;
    case Pattern::Kind::Int: return std::to_string(p.intValue);
    case Pattern::Kind::Float: return floatText(p.floatValue);
    case Pattern::Kind::Bool: return p.boolValue ? "true" : "false";
    case Pattern::Kind::String: return quote(p.name);
    case Pattern::Kind::Unit: return "()";
    case Pattern::Kind::Ctor: return p.args.empty() ? p.name : fmt::format("{}({})", p.name, join(p.args, rec));
    case Pattern::Kind::Tuple: return fmt::format("({})", join(p.args, rec));
    case Pattern::Kind::Nil: return "[]";
    case Pattern::Kind::Cons: {
      std::string head = patternText(p.args.at(0));
      if (p.args[0].kind == Pattern::Kind::Cons) head = "(" + head + ")";
      return head + " :: " + patternText(p.args.at(1));
    }
  }
  return "?";
}

int binaryPrec(std::string_view op) {
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
  if (op == "+" || op == "-") return 6;
  return 7;
}

std::string paramsText(const std::vector<Param>& params) {
  return join(params, [](const Param& p) {
    return p.annotation ? fmt::format("{}: {}", p.name, typeText(*p.annotation)) : p.name;
  });
}

// Expressions that can only be written across several lines.
bool needsBlock(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Let:
    case ExprKind::Seq:
    case ExprKind::Case:
    case ExprKind::Receive:
    case ExprKind::Loop: return true;
    default: break;
  }
  for (const auto& c : e.children) {
    if (c && needsBlock(*c)) return true;
  }
  return false;
}

class Printer {
 public:
  std::string inlineExpr(const Expr& e, int prec) {
    auto all = [&](const std::vector<ExprPtr>& xs, std::size_t from = 0) {
      std::string out;
      for (std::size_t i = from; i < xs.size(); ++i) {
        if (i > from) out += ", ";
        out += inlineExpr(*xs[i], 0);
      }
      return out;
    };
    auto wrap = [&](int own, std::string s) { return own < prec ? "(" + s + ")" : s; };
    switch (e.kind) {
      case ExprKind::IntLit: return std::to_string(e.intValue);
      case ExprKind::FloatLit: return floatText(e.floatValue);
      case ExprKind::BoolLit: return e.boolValue ? "true" : "false";
      case ExprKind::StringLit: return quote(e.text);
      case ExprKind::UnitLit: return "()";
      case ExprKind::Var: return e.text;
      case ExprKind::Break: return "break";
      case ExprKind::Ctor: return e.children.empty() ? e.text : fmt::format("{}({})", e.text, all(e.children));
      case ExprKind::Call: return fmt::format("{}({})", inlineExpr(*e.children[0], 9), all(e.children, 1));
      case ExprKind::Print: return fmt::format("print({})", all(e.children));
      case ExprKind::Spawn: return fmt::format("spawn {}({})", e.text, all(e.children));
      case ExprKind::List: return fmt::format("[{}]", all(e.children));
      case ExprKind::Tuple: return fmt::format("({})", all(e.children));
      case ExprKind::Send:
        return wrap(8, fmt::format("{}.send {}", inlineExpr(*e.children[0], 9), inlineExpr(*e.children[1], 8)));
      case ExprKind::Await: return wrap(8, "await " + inlineExpr(*e.children[0], 8));
      case ExprKind::Unary:
        return wrap(8, (e.text == "not" ? "not " : e.text) + inlineExpr(*e.children[0], 8));
      case ExprKind::Binary: {
        int p = binaryPrec(e.text);
        int lp = p == 4 ? 5 : p;
        return wrap(p, fmt::format("{} {} {}", inlineExpr(*e.children[0], lp), e.text,
                                   inlineExpr(*e.children[1], p + 1)));
      }
      case ExprKind::Cons:
        return wrap(5, fmt::format("{} :: {}", inlineExpr(*e.children[0], 6), inlineExpr(*e.children[1], 5)));
      case ExprKind::If:
        return wrap(0, fmt::format("if {} then {} else {}", inlineExpr(*e.children[0], 0),
                                   inlineExpr(*e.children[1], 0), inlineExpr(*e.children[2], 0)));
      case ExprKind::Lambda:
        return wrap(0, fmt::format("fn({}) -> {}", paramsText(e.params), inlineExpr(*e.children[0], 0)));
      case ExprKind::Reply: return wrap(0, "reply " + inlineExpr(*e.children[0], 0));
      default: break;
    }
    throw InternalError("expression cannot be printed on one line");
  }

  // Text starting mid-line that may continue onto further lines at `indent`.
  std::string tail(const Expr& e, int indent) {
    if (!needsBlock(e)) return inlineExpr(e, 0);
    switch (e.kind) {
      case ExprKind::Case:
        return "case " + inlineExpr(*e.children[0], 0) + "\n" + arms(e.arms, indent + 1) + trimmed();
      case ExprKind::Receive:
        return fmt::format("receive {}: {}\n", e.text, typeText(*e.annotation)) + arms(e.arms, indent + 1) +
               trimmed();
      case ExprKind::Loop: return "loop\n" + block(*e.children[0], indent + 1) + trimmed();
      case ExprKind::If:
        return "if " + inlineExpr(*e.children[0], 0) + " then\n" + block(*e.children[1], indent + 1) +
               pad(indent) + "else\n" + block(*e.children[2], indent + 1) + trimmed();
      case ExprKind::Lambda:
        return fmt::format("fn({}) ->\n", paramsText(e.params)) + block(*e.children[0], indent + 1) + trimmed();
      case ExprKind::Reply: return "reply " + tail(*e.children[0], indent);
      default: break;
    }
    throw InternalError("expression cannot start mid-line");
  }

  // Lines (each newline-terminated) for a statement sequence.
  std::string block(const Expr& e, int indent) {
    if (e.kind == ExprKind::Let) {
      std::string out = pad(indent) + fmt::format("let {} = ", patternText(*e.pattern)) +
                        stripped(tail(*e.children[0], indent)) + "\n";
      return out + block(*e.children[1], indent);
    }
    if (e.kind == ExprKind::Seq) {
      std::string out;
      for (const auto& c : e.children) out += block(*c, indent);
      return out;
    }
    return pad(indent) + stripped(tail(e, indent)) + "\n";
  }

  std::string arms(const std::vector<Arm>& as, int indent) {
    std::string out;
    for (const auto& a : as) {
      out += pad(indent) + patternText(a.pattern) + " ->";
      if (needsBlock(*a.body)) {
        out += "\n" + block(*a.body, indent + 1);
      } else {
        out += " " + inlineExpr(*a.body, 0) + "\n";
      }
    }
    return out;
  }

 private:
  // Multi-line tails are produced newline-terminated; marker for stripping.
  static std::string trimmed() { return "\x01"; }
  static std::string stripped(std::string s) {
    if (!s.empty() && s.back() == '\x01') {
      s.pop_back();
      if (!s.empty() && s.back() == '\n') s.pop_back();
    }
    return s;
  }
};

std::string declText(const Decl& d) {
  Printer pr;
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FnDecl>) {
          std::string head = fmt::format("fn {}({})", n.name, paramsText(n.params));
          if (n.result) head += " -> " + typeText(*n.result);
          return head + "\n" + pr.block(*n.body, 1);
        } else if constexpr (std::is_same_v<T, TypeDecl>) {
          std::string head = "type " + n.name;
          if (!n.typeParams.empty()) head += "[" + join(n.typeParams, [](const std::string& s) { return s; }) + "]";
          head += " =\n";
          for (const auto& c : n.ctors) {
            head += "  | " + c.name;
            if (!c.fields.empty()) {
              head += "(" + join(c.fields, [](const auto& f) {
                        return f.first.empty() ? typeText(f.second) : f.first + ": " + typeText(f.second);
                      }) + ")";
            }
            head += "\n";
          }
          return head;
        } else if constexpr (std::is_same_v<T, ActorDecl>) {
          std::string head = fmt::format("actor {}\n  fn run({})", n.name, n.selfName);
          if (n.result) head += " -> " + typeText(*n.result);
          return head + "\n" + pr.block(*n.runBody, 2);
        } else if constexpr (std::is_same_v<T, SupervisorDecl>) {
          std::string out = fmt::format("supervisor {}\n  strategy {}\n", n.name, strategyName(n.strategy));
          if (n.restartLimit) out += fmt::format("  restarts {} within {}\n", n.restartLimit->first, n.restartLimit->second);
          out += "  children\n";
          for (const auto& c : n.children) {
            std::string args;
            for (std::size_t i = 0; i < c.args.size(); ++i) {
              if (i) args += ", ";
              args += pr.inlineExpr(*c.args[i], 0);
            }
            out += fmt::format("    {}: {}({}), {}\n", c.id, c.actor, args, policyName(c.policy));
          }
          return out;
        } else {
          return fmt::format("external fn {}({}) -> {} = mfa {} {} {}\n", n.name,
                             join(n.params, [](const TypeExpr& t) { return typeText(t); }), typeText(n.result),
                             quote(n.module), quote(n.function), n.arity);
        }
      },
      d.node);
}

// ---- span-free dump -----------------------------------------------------------

std::string dumpType(const TypeExpr& t) {
  static constexpr const char* kinds[] = {"name", "var", "list", "tuple", "fn"};
  std::string out = fmt::format("({} {}", kinds[static_cast<int>(t.kind)], t.name);
  for (const auto& a : t.args) out += " " + dumpType(a);
  return out + ")";
}

std::string dumpPattern(const Pattern& p) {
  static constexpr const char* kinds[] = {"_", "pvar", "pint", "pfloat", "pbool", "pstr",
                                          "punit", "pctor", "ptuple", "pnil", "pcons"};
  std::string out = fmt::format("({}", kinds[static_cast<int>(p.kind)]);
  switch (p.kind) {
    case Pattern::Kind::Var:
    case Pattern::Kind::Ctor: out += " " + p.name; break;
    case Pattern::Kind::String: out += " " + quote(p.name); break;
    case Pattern::Kind::Int: out += " " + std::to_string(p.intValue); break;
    case Pattern::Kind::Float: out += " " + floatText(p.floatValue); break;
    case Pattern::Kind::Bool: out += p.boolValue ? " true" : " false"; break;
    default: break;
  }
  for (const auto& a : p.args) out += " " + dumpPattern(a);
  return out + ")";
}

constexpr const char* kExprNames[] = {"int", "float", "bool", "str", "unit", "var", "ctor", "call", "lambda",
                                      "let", "if", "case", "binary", "unary", "list", "tuple", "cons", "spawn",
                                      "send", "await", "reply", "receive", "loop", "break", "seq", "print"};

std::string dumpExpr(const Expr& e) {
  std::string out = fmt::format("({}", kExprNames[static_cast<int>(e.kind)]);
  switch (e.kind) {
    case ExprKind::IntLit: out += " " + std::to_string(e.intValue); break;
    case ExprKind::FloatLit: out += " " + floatText(e.floatValue); break;
    case ExprKind::BoolLit: out += e.boolValue ? " true" : " false"; break;
    case ExprKind::StringLit: out += " " + quote(e.text); break;
    default:
      if (!e.text.empty()) out += " " + e.text;
  }
  for (const auto& p : e.params) {
    out += " (param " + p.name;
    if (p.annotation) out += " " + dumpType(*p.annotation);
    out += ")";
  }
  if (e.pattern) out += " " + dumpPattern(*e.pattern);
  if (e.annotation) out += " " + dumpType(*e.annotation);
  for (const auto& c : e.children) out += " " + (c ? dumpExpr(*c) : std::string("null"));
  for (const auto& a : e.arms) out += " (arm " + dumpPattern(a.pattern) + " " + dumpExpr(*a.body) + ")";
  return out + ")";
}

std::string dumpDecl(const Decl& d) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        auto optType = [](const std::optional<TypeExpr>& t) { return t ? dumpType(*t) : std::string("none"); };
        if constexpr (std::is_same_v<T, FnDecl>) {
          std::string out = "(fn " + n.name;
          for (const auto& p : n.params) out += " (param " + p.name + " " + optType(p.annotation) + ")";
          return out + " " + optType(n.result) + " " + dumpExpr(*n.body) + ")";
        } else if constexpr (std::is_same_v<T, TypeDecl>) {
          std::string out = "(type " + n.name;
          for (const auto& tp : n.typeParams) out += " " + tp;
          for (const auto& c : n.ctors) {
            out += " (ctor " + c.name;
            for (const auto& [f, t] : c.fields) out += " (" + f + " " + dumpType(t) + ")";
            out += ")";
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, ActorDecl>) {
          return "(actor " + n.name + " " + n.selfName + " " + optType(n.result) + " " + dumpExpr(*n.runBody) + ")";
        } else if constexpr (std::is_same_v<T, SupervisorDecl>) {
          std::string out = fmt::format("(supervisor {} {}", n.name, strategyName(n.strategy));
          if (n.restartLimit) out += fmt::format(" (limit {} {})", n.restartLimit->first, n.restartLimit->second);
          for (const auto& c : n.children) {
            out += fmt::format(" (child {} {} {}", c.id, c.actor, policyName(c.policy));
            for (const auto& a : c.args) out += " " + dumpExpr(*a);
            out += ")";
          }
          return out + ")";
        } else {
          std::string out = "(external " + n.name;
          for (const auto& p : n.params) out += " " + dumpType(p);
          return out + fmt::format(" {} {} {} {})", dumpType(n.result), n.module, n.function, n.arity);
        }
      },
      d.node);
}

}  // namespace

std::string prettyPrint(const SourceProgram& program) {
  std::string out;
  for (const auto& imp : program.imports) out += "import " + imp.name + "\n";
  for (const auto& d : program.decls) {
    if (!out.empty()) out += "\n";
    out += declText(d);
  }
  return out;
}

std::string prettyPrint(const Expr& expr) {
  Printer pr;
  std::string s = pr.block(expr, 0);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

std::string prettyPrint(const TypeExpr& type) { return typeText(type); }
std::string prettyPrint(const Pattern& pattern) { return patternText(pattern); }

std::string dump(const SourceProgram& program) {
  std::string out = "(program";
  for (const auto& imp : program.imports) out += " (import " + imp.name + ")";
  for (const auto& d : program.decls) out += " " + dumpDecl(d);
  return out + ")";
}

std::string dump(const Expr& expr) { return dumpExpr(expr); }

}  // namespace nvlang::syntax
