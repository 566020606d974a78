#include "nvlang/ast.hpp"

namespace nvlang::syntax {

ExprPtr makeExpr(ExprKind kind, Span span) { return std::make_unique<Expr>(kind, span); }

ExprPtr clone(const Expr& e) {
  auto out = makeExpr(e.kind, e.span);
  out->intValue = e.intValue;
  out->floatValue = e.floatValue;
  out->boolValue = e.boolValue;
  out->text = e.text;
  for (const auto& c : e.children) out->children.push_back(c ? clone(*c) : nullptr);
  for (const auto& a : e.arms) out->arms.push_back(Arm{a.pattern, clone(*a.body)});
  out->params = e.params;
  out->pattern = e.pattern;
  out->annotation = e.annotation;
  out->printsString = e.printsString;
  out->floatOp = e.floatOp;
  out->globalRef = e.globalRef;
  return out;
}

std::string_view strategyName(Strategy s) {
  switch (s) {
    case Strategy::OneForOne: return "one_for_one";
    case Strategy::OneForAll: return "one_for_all";
    case Strategy::RestForOne: return "rest_for_one";
  }
  return "?";
}

std::string_view policyName(RestartPolicy p) {
  switch (p) {
    case RestartPolicy::Permanent: return "permanent";
    case RestartPolicy::Transient: return "transient";
    case RestartPolicy::Temporary: return "temporary";
  }
  return "?";
}

const std::string& Decl::name() const {
  return std::visit([](const auto& d) -> const std::string& { return d.name; }, node);
}

}  // namespace nvlang::syntax
