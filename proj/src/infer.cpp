#include "nvlang/infer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>

namespace nvlang::types {

using syntax::Expr;
using syntax::ExprKind;
using syntax::Pattern;
using syntax::TypeExpr;

std::optional<std::vector<CtorSig>> TypeEnv::signature(const Type& t) const {
  if (t.kind != Kind::Named) return std::nullopt;
  auto it = adts.find(t.name);
  if (it == adts.end()) return std::nullopt;
  const AdtInfo& adt = it->second;
  Substitution s;
  for (std::size_t i = 0; i < adt.paramVars.size() && i < t.args.size(); ++i) s[adt.paramVars[i]] = t.args[i];
  std::vector<CtorSig> out;
  for (const auto& c : adt.ctors) {
    const CtorInfo& ci = ctors.at(c);
    CtorSig sig{c, {}};
    for (const auto& f : ci.fields) sig.fields.push_back(applySubst(s, f));
    out.push_back(std::move(sig));
  }
  return out;
}

namespace {

bool containsReply(const Expr& e) {
  if (e.kind == ExprKind::Reply) return true;
  if (e.kind == ExprKind::Lambda || e.kind == ExprKind::Receive) return false;
  for (const auto& c : e.children) {
    if (c && containsReply(*c)) return true;
  }
  for (const auto& a : e.arms) {
    if (containsReply(*a.body)) return true;
  }
  return false;
}

bool endsInBreak(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Break: return true;
    case ExprKind::Seq: return endsInBreak(*e.children.back());
    case ExprKind::Let: return endsInBreak(*e.children[1]);
    case ExprKind::If: return endsInBreak(*e.children[1]) || endsInBreak(*e.children[2]);
    case ExprKind::Case:
      return std::any_of(e.arms.begin(), e.arms.end(), [](const syntax::Arm& a) { return endsInBreak(*a.body); });
    default: return false;
  }
}

void collectVarNames(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) out.insert(e.text);
  for (const auto& c : e.children) {
    if (c) collectVarNames(*c, out);
  }
  for (const auto& a : e.arms) collectVarNames(*a.body, out);
}

bool isComparison(const std::string& op) { return op == "<" || op == "<=" || op == ">" || op == ">="; }
bool isArithmetic(const std::string& op) { return op == "+" || op == "-" || op == "*" || op == "/" || op == "%"; }

class Inferencer {
 public:
  explicit Inferencer(syntax::SourceProgram& prog) : prog_(prog) {}

  TypedProgram run() {
    registerAdts();
    registerBuiltins();
    registerExternals();
    registerActors();
    inferFunctions();
    inferActors();
    inferSupervisorArgs();
    return finish();
  }

  TypedProgram runExpression(Expr& e, Type* result) {
    registerAdts();
    registerBuiltins();
    registerExternals();
    registerActors();
    inferFunctions();
    Type t = infer(e);
    processDeferred();
    auto out = finish();
    if (result) *result = out.exprTypes.at(&e);
    return out;
  }

 private:
  struct Local {
    std::string name;
    Scheme scheme;
  };
  struct RecvCtx {
    std::string adt;
    std::string ctor;
  };
  struct DeferredSend {
    Type message;
    Type reply;
    Span span;
  };

  // ---- errors and unification ---------------------------------------------

  [[noreturn]] void error(ErrorKind k, Span span, std::string msg) { throw CompileError(k, span, std::move(msg)); }

  Type res(const Type& t) const { return resolve(theta_, t); }

  void bind(const Substitution& s) {
    for (const auto& [v, t] : s) theta_[v] = t;
  }

  // Unifies `expected` with `found`; on failure reports `what`.
  void expect(const Type& expected, const Type& found, Span span, const std::string& what,
              ErrorKind kind = ErrorKind::TypeMismatch) {
    Type a = res(expected);
    Type b = res(found);
    try {
      bind(unify(a, b));
    } catch (const UnifyError& e) {
      TypePrinter p;
      std::string exp = p.print(a);
      std::string got = p.print(b);
      ErrorKind k = kind;
      if (e.reason == UnifyError::Reason::Occurs) k = ErrorKind::OccursCheck;
      error(k, span, fmt::format("{}: expected {}, found {}{}", what, exp, got,
                                 e.reason == UnifyError::Reason::Occurs ? " (infinite type)" : ""));
    }
  }

  Type fresh() { return fresh_.fresh(); }

  Type replyVar(const std::string& adt) {
    auto it = env_.replyTypes.find(adt);
    if (it == env_.replyTypes.end()) it = env_.replyTypes.emplace(adt, fresh()).first;
    return it->second;
  }

  // ---- annotations ---------------------------------------------------------

  Type fromAnnotation(const TypeExpr& te, std::map<std::string, Type>* vars,
                      const std::map<std::string, Type>* typeParams = nullptr) {
    auto sub = [&](const TypeExpr& a) { return fromAnnotation(a, vars, typeParams); };
    auto want = [&](std::size_t n) {
      if (te.args.size() != n) {
        error(ErrorKind::WrongArity, te.span,
              fmt::format("type {} expects {} argument(s), found {}", te.name, n, te.args.size()));
      }
    };
    switch (te.kind) {
      case TypeExpr::Kind::Var: {
        if (!vars) error(ErrorKind::UnknownType, te.span, fmt::format("type variable '{}' is not in scope", te.name));
        auto it = vars->find(te.name);
        if (it == vars->end()) it = vars->emplace(te.name, fresh()).first;
        return it->second;
      }
      case TypeExpr::Kind::List: return Type::list(sub(te.args[0]));
      case TypeExpr::Kind::Tuple: {
        if (te.args.empty()) return Type::prim(Kind::Unit);
        std::vector<Type> members;
        for (const auto& a : te.args) members.push_back(sub(a));
        return Type::tuple(std::move(members));
      }
      case TypeExpr::Kind::Fn: {
        std::vector<Type> params;
        for (std::size_t i = 0; i + 1 < te.args.size(); ++i) params.push_back(sub(te.args[i]));
        return Type::fn(std::move(params), sub(te.args.back()));
      }
      case TypeExpr::Kind::Name: break;
    }
    static const std::map<std::string, Kind> prims{
        {"Int", Kind::Int},     {"Float", Kind::Float}, {"Bool", Kind::Bool},
        {"String", Kind::String}, {"Unit", Kind::Unit}, {"Any", Kind::Any},
        {"MonitorRef", Kind::MonitorRef}};
    if (auto it = prims.find(te.name); it != prims.end()) {
      want(0);
      return Type::prim(it->second);
    }
    if (typeParams) {
      if (auto it = typeParams->find(te.name); it != typeParams->end()) {
        want(0);
        return it->second;
      }
    }
    if (te.name == "Pid") {
      if (te.args.empty()) return Type::prim(Kind::PidAny);
      want(1);
      return Type::pid(sub(te.args[0]));
    }
    if (te.name == "Future") {
      want(1);
      return Type::future(sub(te.args[0]));
    }
    if (te.name == "Map") {
      want(2);
      return Type::map(sub(te.args[0]), sub(te.args[1]));
    }
    if (te.name == "List") {
      want(1);
      return Type::list(sub(te.args[0]));
    }
    auto adt = env_.adts.find(te.name);
    if (adt == env_.adts.end()) error(ErrorKind::UnknownType, te.span, fmt::format("unknown type '{}'", te.name));
    want(adt->second.params.size());
    std::vector<Type> args;
    for (const auto& a : te.args) args.push_back(sub(a));
    return Type::named(te.name, std::move(args));
  }

  // ---- declarations ----------------------------------------------------------

  void registerAdts() {
    for (auto& d : prog_.decls) {
      if (auto* td = std::get_if<syntax::TypeDecl>(&d.node)) {
        AdtInfo info{td->name, td->typeParams, {}, {}};
        for (std::size_t i = 0; i < td->typeParams.size(); ++i) info.paramVars.push_back(fresh().var);
        for (const auto& c : td->ctors) info.ctors.push_back(c.name);
        env_.adts.emplace(td->name, std::move(info));
      }
    }
    for (auto& d : prog_.decls) {
      auto* td = std::get_if<syntax::TypeDecl>(&d.node);
      if (!td) continue;
      const AdtInfo& info = env_.adts.at(td->name);
      std::map<std::string, Type> params;
      for (std::size_t i = 0; i < info.params.size(); ++i) params.emplace(info.params[i], Type::makeVar(info.paramVars[i]));
      int index = 0;
      for (const auto& c : td->ctors) {
        CtorInfo ci{c.name, td->name, {}, {}, index++};
        for (const auto& [fname, ftype] : c.fields) {
          ci.fieldNames.push_back(fname);
          ci.fields.push_back(fromAnnotation(ftype, nullptr, &params));
        }
        if (env_.ctors.count(c.name)) {
          error(ErrorKind::DuplicateDefinition, c.span, fmt::format("constructor '{}' is defined twice", c.name));
        }
        env_.ctors.emplace(c.name, std::move(ci));
      }
    }
  }

  void registerBuiltins() {
    Type a = fresh();
    env_.globals["crash"] = Scheme{{a.var}, Type::fn({Type::prim(Kind::String)}, a)};
  }

  void registerExternals() {
    for (auto& d : prog_.decls) {
      auto* ex = std::get_if<syntax::ExternalDecl>(&d.node);
      if (!ex) continue;
      std::map<std::string, Type> vars;
      std::vector<Type> params;
      for (const auto& p : ex->params) params.push_back(fromAnnotation(p, &vars));
      Type t = Type::fn(std::move(params), fromAnnotation(ex->result, &vars));
      if (static_cast<int>(t.arity()) != ex->arity) {
        error(ErrorKind::WrongArity, d.span,
              fmt::format("external '{}' declares {} parameter(s) but arity {}", ex->name, t.arity(), ex->arity));
      }
      env_.globals[ex->name] = generalize({}, t);
    }
  }

  // Message type of an actor: the receive annotation reachable from its run
  // body, following calls to top-level functions.
  void registerActors() {
    std::map<std::string, const syntax::FnDecl*> fns;
    for (auto& d : prog_.decls) {
      if (auto* f = std::get_if<syntax::FnDecl>(&d.node)) fns[f->name] = f;
    }
    for (auto& d : prog_.decls) {
      if (auto* sd = std::get_if<syntax::SupervisorDecl>(&d.node)) {
        env_.actors[sd->name] = ActorSig{sd->name, Type::prim(Kind::PidAny), true};
        continue;
      }
      auto* ad = std::get_if<syntax::ActorDecl>(&d.node);
      if (!ad) continue;
      std::vector<const TypeExpr*> found;
      std::set<std::string> visited;
      std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == ExprKind::Receive) found.push_back(&*e.annotation);
        if (e.kind == ExprKind::Var) {
          auto it = fns.find(e.text);
          if (it != fns.end() && visited.insert(e.text).second) walk(*it->second->body);
        }
        for (const auto& c : e.children) {
          if (c) walk(*c);
        }
        for (const auto& a : e.arms) walk(*a.body);
      };
      walk(*ad->runBody);
      if (found.empty()) {
        error(ErrorKind::NoReceiveBlock, d.span, fmt::format("actor {} has no receive block", ad->name));
      }
      std::optional<Type> msg;
      for (const auto* te : found) {
        Type t = fromAnnotation(*te, nullptr);
        if (t.kind != Kind::Named) {
          error(ErrorKind::MessageTypeNotADT, te->span,
                fmt::format("actor {} receives {}, which is not an algebraic data type", ad->name, typeString(t)));
        }
        if (msg && !(*msg == t)) {
          error(ErrorKind::TypeMismatch, te->span,
                fmt::format("actor {} receives both {} and {}", ad->name, typeString(*msg), typeString(t)));
        }
        msg = t;
      }
      env_.actors[ad->name] = ActorSig{ad->name, *msg, false};
    }
  }

  void inferFunctions() {
    std::vector<syntax::FnDecl*> fns;
    std::map<std::string, std::size_t> index;
    for (auto& d : prog_.decls) {
      if (auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
        index[f->name] = fns.size();
        fns.push_back(f);
        fnSpans_[f->name] = d.span;
      }
    }
    // Tarjan's SCC over the reference graph; emits callees first.
    std::vector<std::vector<std::size_t>> edges(fns.size());
    for (std::size_t i = 0; i < fns.size(); ++i) {
      std::set<std::string> names;
      collectVarNames(*fns[i]->body, names);
      for (const auto& n : names) {
        if (auto it = index.find(n); it != index.end()) edges[i].push_back(it->second);
      }
    }
    std::vector<int> idx(fns.size(), -1), low(fns.size(), 0);
    std::vector<bool> onStack(fns.size(), false);
    std::vector<std::size_t> stack;
    int counter = 0;
    std::function<void(std::size_t)> strong = [&](std::size_t v) {
      idx[v] = low[v] = counter++;
      stack.push_back(v);
      onStack[v] = true;
      for (std::size_t w : edges[v]) {
        if (idx[w] < 0) {
          strong(w);
          low[v] = std::min(low[v], low[w]);
        } else if (onStack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      }
      if (low[v] == idx[v]) {
        std::vector<syntax::FnDecl*> scc;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          onStack[w] = false;
          scc.push_back(fns[w]);
        } while (w != v);
        std::reverse(scc.begin(), scc.end());
        inferScc(scc);
      }
    };
    for (std::size_t i = 0; i < fns.size(); ++i) {
      if (idx[i] < 0) strong(i);
    }
  }

  struct FnState {
    Type type;
    std::map<std::string, Type> annotationVars;
  };

  void inferScc(const std::vector<syntax::FnDecl*>& scc) {
    std::vector<FnState> states;
    for (auto* f : scc) {
      FnState st;
      std::vector<Type> params;
      for (const auto& p : f->params) {
        params.push_back(p.annotation ? fromAnnotation(*p.annotation, &st.annotationVars) : fresh());
      }
      Type result = f->result ? fromAnnotation(*f->result, &st.annotationVars) : fresh();
      st.type = Type::fn(std::move(params), result);
      monoFns_[f->name] = st.type;
      states.push_back(std::move(st));
    }
    for (std::size_t i = 0; i < scc.size(); ++i) {
      auto* f = scc[i];
      annotationVars_ = &states[i].annotationVars;
      locals_.clear();
      for (std::size_t p = 0; p < f->params.size(); ++p) {
        locals_.push_back(Local{f->params[p].name, Scheme{{}, states[i].type.args[p]}});
      }
      Type body = infer(*f->body);
      expect(states[i].type.result(), body, f->body->span, fmt::format("result of function '{}'", f->name));
      annotationVars_ = nullptr;
    }
    locals_.clear();
    processDeferred();
    for (std::size_t i = 0; i < scc.size(); ++i) checkRigid(scc[i]->name, states[i]);
    monoFns_.clear();
    std::set<int> envFree = globalFree();
    for (std::size_t i = 0; i < scc.size(); ++i) {
      env_.globals[scc[i]->name] = generalize(envFree, res(states[i].type));
      fnTypes_[scc[i]->name] = states[i].type;
    }
  }

  // Annotated type variables are rigid: each must still be a distinct,
  // unconstrained variable once the body has been checked.
  void checkRigid(const std::string& fn, const FnState& st) {
    std::set<int> seen;
    for (const auto& [name, t] : st.annotationVars) {
      Type r = res(t);
      if (r.kind != Kind::Var || !seen.insert(r.var).second) {
        TypePrinter p;
        error(ErrorKind::AnnotationTooGeneral, fnSpans_[fn],
              fmt::format("annotation of '{}' is more general than its inferred type {}: type variable '{}' is {}",
                          fn, p.print(res(st.type)), name, p.print(r)));
      }
    }
  }

  void inferActors() {
    for (auto& d : prog_.decls) {
      auto* ad = std::get_if<syntax::ActorDecl>(&d.node);
      if (!ad) continue;
      std::map<std::string, Type> vars;
      annotationVars_ = &vars;
      locals_.clear();
      locals_.push_back(Local{ad->selfName, Scheme{{}, Type::pid(env_.actors.at(ad->name).messageType)}});
      Type body = infer(*ad->runBody);
      if (ad->result) expect(fromAnnotation(*ad->result, &vars), body, ad->runBody->span, "result of run");
      actorRunTypes_[ad->name] = body;
      annotationVars_ = nullptr;
      locals_.clear();
      processDeferred();
    }
  }

  void inferSupervisorArgs() {
    for (auto& d : prog_.decls) {
      auto* sd = std::get_if<syntax::SupervisorDecl>(&d.node);
      if (!sd) continue;
      for (auto& c : sd->children) {
        for (auto& a : c.args) infer(*a);
      }
    }
  }

  std::set<int> globalFree() {
    std::set<int> out;
    for (const auto& [_, t] : env_.replyTypes) {
      for (int v : freeVars(res(t))) out.insert(v);
    }
    for (const auto& d : deferred_) {
      for (int v : freeVars(res(d.reply))) out.insert(v);
    }
    return out;
  }

  std::set<int> envFree() {
    std::set<int> out = globalFree();
    for (const auto& l : locals_) {
      Scheme sc{l.scheme.quantified, res(l.scheme.body)};
      for (int v : freeVars(sc)) out.insert(v);
    }
    for (const auto& [_, t] : monoFns_) {
      for (int v : freeVars(res(t))) out.insert(v);
    }
    return out;
  }

  void processDeferred() {
    std::vector<DeferredSend> still;
    for (auto& d : deferred_) {
      Type m = res(d.message);
      if (m.kind == Kind::Named) {
        expect(replyVar(m.name), d.reply, d.span, "reply type of message");
      } else {
        still.push_back(d);
      }
    }
    deferred_ = std::move(still);
  }

  TypedProgram finish() {
    for (auto& [adt, t] : env_.replyTypes) {
      Type r = res(t);
      if (r.kind == Kind::Var) bind({{r.var, Type::prim(Kind::Unit)}});
    }
    TypedProgram out;
    for (auto& [adt, t] : env_.replyTypes) t = res(t);
    for (auto& [name, sc] : env_.globals) sc.body = res(sc.body);
    out.env = std::move(env_);
    for (const auto& [e, t] : types_) out.exprTypes.emplace(e, res(t));
    for (Expr* p : prints_) p->printsString = res(types_.at(p->children[0].get())).kind == Kind::String;
    for (Expr* b : numeric_) b->floatOp = res(types_.at(b->children[0].get())).kind == Kind::Float;
    for (const auto& [n, t] : actorRunTypes_) out.actorRunTypes[n] = res(t);
    return out;
  }

  // ---- expressions -----------------------------------------------------------

  const Local* lookupLocal(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

  Type infer(Expr& e) {
    Type t = inferInner(e);
    types_[&e] = t;
    return t;
  }

  Type inferInner(Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Type::prim(Kind::Int);
      case ExprKind::FloatLit: return Type::prim(Kind::Float);
      case ExprKind::BoolLit: return Type::prim(Kind::Bool);
      case ExprKind::StringLit: return Type::prim(Kind::String);
      case ExprKind::UnitLit: return Type::prim(Kind::Unit);
      case ExprKind::Var: return inferVar(e);
      case ExprKind::Ctor: return inferCtor(e);
      case ExprKind::Call: return inferCall(e);
      case ExprKind::Lambda: return inferLambda(e);
      case ExprKind::Let: return inferLet(e);
      case ExprKind::If: {
        expect(Type::prim(Kind::Bool), infer(*e.children[0]), e.children[0]->span, "condition of if");
        Type t = infer(*e.children[1]);
        expect(t, infer(*e.children[2]), e.children[2]->span, "else branch must match then branch");
        return t;
      }
      case ExprKind::Case: return inferCase(e);
      case ExprKind::Binary: return inferBinary(e);
      case ExprKind::Unary: {
        Type t = infer(*e.children[0]);
        if (e.text == "not") {
          expect(Type::prim(Kind::Bool), t, e.children[0]->span, "operand of 'not'");
          return t;
        }
        numeric_.push_back(&e);
        Type num = Type::prim(res(t).kind == Kind::Float ? Kind::Float : Kind::Int);
        expect(num, t, e.children[0]->span, "operand of unary '-'");
        return num;
      }
      case ExprKind::List: {
        Type elem = fresh();
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          expect(elem, infer(*e.children[i]), e.children[i]->span, fmt::format("list element {}", i + 1));
        }
        return Type::list(elem);
      }
      case ExprKind::Tuple: {
        std::vector<Type> members;
        for (auto& c : e.children) members.push_back(infer(*c));
        return Type::tuple(std::move(members));
      }
      case ExprKind::Cons: {
        Type head = infer(*e.children[0]);
        Type tail = infer(*e.children[1]);
        expect(Type::list(head), tail, e.children[1]->span, "tail of '::'");
        return Type::list(head);
      }
      case ExprKind::Spawn: return inferSpawn(e);
      case ExprKind::Send: return inferSend(e);
      case ExprKind::Await: {
        Type t = res(infer(*e.children[0]));
        if (t.kind == Kind::Future) return t.args[0];
        if (t.kind == Kind::Var) {
          Type inner = fresh();
          expect(Type::future(inner), t, e.span, "operand of await");
          return inner;
        }
        error(ErrorKind::AwaitOnNonFuture, e.span, fmt::format("await expects a Future, found {}", typeString(t)));
      }
      case ExprKind::Reply: return inferReply(e);
      case ExprKind::Receive: return inferReceive(e);
      case ExprKind::Loop: {
        ++loopDepth_;
        infer(*e.children[0]);
        --loopDepth_;
        return Type::prim(Kind::Unit);
      }
      case ExprKind::Break:
        if (loopDepth_ == 0) error(ErrorKind::BreakOutsideLoop, e.span, "break outside of a loop");
        return fresh();
      case ExprKind::Seq: {
        Type t;
        for (auto& c : e.children) t = infer(*c);
        return t;
      }
      case ExprKind::Print:
        infer(*e.children[0]);
        prints_.push_back(&e);
        return Type::prim(Kind::Unit);
    }
    throw InternalError("unhandled expression kind");
  }

  Type inferVar(Expr& e) {
    if (const Local* l = lookupLocal(e.text)) return instantiate(l->scheme, fresh_);
    if (auto it = monoFns_.find(e.text); it != monoFns_.end()) {
      e.globalRef = true;
      return it->second;
    }
    if (auto it = env_.globals.find(e.text); it != env_.globals.end()) {
      e.globalRef = true;
      return instantiate(it->second, fresh_);
    }
    error(ErrorKind::UnboundVariable, e.span, fmt::format("unbound variable '{}'", e.text));
  }

  const CtorInfo& ctorInfo(const std::string& name, Span span, const char* where) {
    auto it = env_.ctors.find(name);
    if (it == env_.ctors.end()) error(ErrorKind::UnknownConstructor, span, fmt::format("unknown constructor '{}'{}", name, where));
    return it->second;
  }

  // Fresh instance of a constructor: (field types, result type).
  std::pair<std::vector<Type>, Type> instantiateCtor(const CtorInfo& ci) {
    const AdtInfo& adt = env_.adts.at(ci.adt);
    Substitution s;
    std::vector<Type> args;
    for (int v : adt.paramVars) {
      Type f = fresh();
      s[v] = f;
      args.push_back(f);
    }
    std::vector<Type> fields;
    for (const auto& f : ci.fields) fields.push_back(applySubst(s, f));
    return {fields, Type::named(ci.adt, args)};
  }

  Type inferCtor(Expr& e) {
    const CtorInfo& ci = ctorInfo(e.text, e.span, "");
    auto [fields, result] = instantiateCtor(ci);
    if (fields.size() != e.children.size()) {
      error(ErrorKind::WrongArity, e.span,
            fmt::format("constructor {} expects {} argument(s), found {}", e.text, fields.size(), e.children.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      expect(fields[i], infer(*e.children[i]), e.children[i]->span,
             fmt::format("argument {} of constructor {}", i + 1, e.text));
    }
    return result;
  }

  Type inferCall(Expr& e) {
    Expr& callee = *e.children[0];
    Type ft = res(infer(callee));
    std::string name = callee.kind == ExprKind::Var ? fmt::format("'{}'", callee.text) : std::string("function");
    std::vector<Type> args;
    for (std::size_t i = 1; i < e.children.size(); ++i) args.push_back(infer(*e.children[i]));
    if (ft.kind == Kind::Var) {
      Type result = fresh();
      expect(ft, Type::fn(args, result), e.span, fmt::format("call of {}", name));
      return result;
    }
    if (ft.kind != Kind::Fn) {
      error(ErrorKind::NotAFunction, callee.span, fmt::format("{} has type {} and is not a function", name, typeString(ft)));
    }
    if (ft.arity() != args.size()) {
      error(ErrorKind::WrongArity, e.span,
            fmt::format("{} expects {} argument(s), found {}", name, ft.arity(), args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      expect(ft.args[i], args[i], e.children[i + 1]->span, fmt::format("argument {} of call to {}", i + 1, name));
    }
    return ft.result();
  }

  Type inferLambda(Expr& e) {
    std::vector<Type> params;
    std::size_t mark = locals_.size();
    for (const auto& p : e.params) {
      Type t = p.annotation ? fromAnnotation(*p.annotation, annotationVars_) : fresh();
      params.push_back(t);
      locals_.push_back(Local{p.name, Scheme{{}, t}});
    }
    auto savedRecv = std::move(recv_);
    recv_.clear();
    int savedLoop = std::exchange(loopDepth_, 0);
    Type body = infer(*e.children[0]);
    recv_ = std::move(savedRecv);
    loopDepth_ = savedLoop;
    locals_.resize(mark);
    return Type::fn(std::move(params), body);
  }

  Type inferLet(Expr& e) {
    Pattern& p = *e.pattern;
    Type value = infer(*e.children[0]);
    std::size_t mark = locals_.size();
    if (p.kind == Pattern::Kind::Var) {
      locals_.push_back(Local{p.name, generalize(envFree(), res(value))});
    } else {
      std::vector<Local> binds;
      inferPattern(p, value, binds);
      auto r = checkExhaustive([this](const Type& t) { return env_.signature(t); }, res(value), {&p});
      if (!r.exhaustive) {
        error(ErrorKind::MissingCases, p.span,
              fmt::format("pattern in let is refutable; missing cases: {}", join(r.missing)));
      }
      for (auto& b : binds) locals_.push_back(std::move(b));
    }
    Type body = infer(*e.children[1]);
    locals_.resize(mark);
    return body;
  }

  static std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
    return out;
  }

  void checkArms(const Expr& e, const Type& scrutinee, const char* what) {
    std::vector<const Pattern*> pats;
    for (const auto& a : e.arms) pats.push_back(&a.pattern);
    auto r = checkExhaustive([this](const Type& t) { return env_.signature(t); }, res(scrutinee), pats);
    if (!r.exhaustive) {
      error(ErrorKind::MissingCases, e.span,
            fmt::format("non-exhaustive {} over {}; missing cases: {}", what, typeString(res(scrutinee)), join(r.missing)));
    }
  }

  Type inferCase(Expr& e) {
    Type scrut = infer(*e.children[0]);
    Type result = fresh();
    for (auto& arm : e.arms) {
      std::vector<Local> binds;
      inferPattern(arm.pattern, scrut, binds);
      std::size_t mark = locals_.size();
      for (auto& b : binds) locals_.push_back(std::move(b));
      expect(result, infer(*arm.body), arm.body->span, "case arms must all have the same type");
      locals_.resize(mark);
    }
    checkArms(e, scrut, "case");
    return result;
  }

  Type inferBinary(Expr& e) {
    const std::string& op = e.text;
    Type a = infer(*e.children[0]);
    Type b = infer(*e.children[1]);
    if (op == "==" || op == "!=") {
      expect(a, b, e.span, fmt::format("operands of '{}'", op));
      return Type::prim(Kind::Bool);
    }
    if (op == "&&" || op == "||") {
      expect(Type::prim(Kind::Bool), a, e.children[0]->span, fmt::format("left operand of '{}'", op));
      expect(Type::prim(Kind::Bool), b, e.children[1]->span, fmt::format("right operand of '{}'", op));
      return Type::prim(Kind::Bool);
    }
    if (isArithmetic(op) || isComparison(op)) {
      numeric_.push_back(&e);
      // Int signature first; the Float one when an operand is already Float.
      bool isFloat = (res(a).kind == Kind::Float || res(b).kind == Kind::Float) && op != "%";
      Type num = Type::prim(isFloat ? Kind::Float : Kind::Int);
      expect(num, a, e.children[0]->span, fmt::format("left operand of '{}'", op));
      expect(num, b, e.children[1]->span, fmt::format("right operand of '{}'", op));
      return isComparison(op) ? Type::prim(Kind::Bool) : num;
    }
    throw InternalError("unknown operator " + op);
  }

  Type inferSpawn(Expr& e) {
    auto it = env_.actors.find(e.text);
    if (it == env_.actors.end()) error(ErrorKind::UnknownActor, e.span, fmt::format("spawn of unknown actor '{}'", e.text));
    if (!e.children.empty()) {
      error(ErrorKind::WrongArity, e.span, fmt::format("actor {} takes no arguments, found {}", e.text, e.children.size()));
    }
    if (it->second.supervisor) return Type::prim(Kind::PidAny);
    return Type::pid(it->second.messageType);
  }

  Type inferSend(Expr& e) {
    Type target = res(infer(*e.children[0]));
    Expr& msg = *e.children[1];
    if (target.kind == Kind::Pid && target.args[0].kind == Kind::Named && msg.kind == ExprKind::Ctor) {
      const std::string& adt = target.args[0].name;
      auto it = env_.ctors.find(msg.text);
      std::string accepts = fmt::format("{} accepts {}", typeString(target), adt);
      if (auto a = env_.adts.find(adt); a != env_.adts.end()) accepts += " (" + joinBar(a->second.ctors) + ")";
      if (it == env_.ctors.end()) {
        error(ErrorKind::UnknownConstructor, msg.span,
              fmt::format("'{}' is not a constructor of {}; {}", msg.text, adt, accepts));
      }
      if (it->second.adt != adt) {
        error(ErrorKind::TypeMismatch, msg.span,
              fmt::format("message {} has type {}, not {}; {}", msg.text, it->second.adt, adt, accepts));
      }
    }
    Type m = infer(msg);
    if (target.kind == Kind::PidAny) return Type::future(Type::prim(Kind::Any));
    if (target.kind == Kind::Pid) {
      expect(target.args[0], m, msg.span, fmt::format("message sent to {}", typeString(target)));
      Type mt = res(target.args[0]);
      if (mt.kind == Kind::Named) return Type::future(replyVar(mt.name));
      Type reply = fresh();
      deferred_.push_back(DeferredSend{mt, reply, e.span});
      return Type::future(reply);
    }
    if (target.kind == Kind::Var) {
      expect(target, Type::pid(m), e.children[0]->span, "target of send");
      Type mt = res(m);
      if (mt.kind == Kind::Named) return Type::future(replyVar(mt.name));
      Type reply = fresh();
      deferred_.push_back(DeferredSend{m, reply, e.span});
      return Type::future(reply);
    }
    error(ErrorKind::SendToNonPid, e.children[0]->span,
          fmt::format("send target must be a Pid, found {}", typeString(target)));
  }

  static std::string joinBar(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : " | ") + x;
    return out;
  }

  Type inferReply(Expr& e) {
    if (recv_.empty()) error(ErrorKind::ReplyOutsideReceive, e.span, "reply outside of a receive handler");
    Type v = infer(*e.children[0]);
    const RecvCtx& ctx = recv_.back();
    Type expected = res(replyVar(ctx.adt));
    Type found = res(v);
    try {
      bind(unify(expected, found));
    } catch (const UnifyError&) {
      TypePrinter p;
      std::string exp = p.print(expected);
      error(ErrorKind::NonUniformReply, e.span,
            fmt::format("non-uniform reply in handler for {}: expected {}, found {}", ctx.ctor, exp, p.print(found)));
    }
    return Type::prim(Kind::Unit);
  }

  Type inferReceive(Expr& e) {
    Type msgType = fromAnnotation(*e.annotation, annotationVars_);
    if (msgType.kind != Kind::Named) {
      error(ErrorKind::MessageTypeNotADT, e.annotation->span,
            fmt::format("receive annotation {} is not an algebraic data type", typeString(msgType)));
    }
    const std::string& adt = msgType.name;
    Type result = fresh();
    std::size_t mark = locals_.size();
    locals_.push_back(Local{e.text, Scheme{{}, msgType}});
    for (auto& arm : e.arms) {
      std::vector<Local> binds;
      inferPattern(arm.pattern, msgType, binds);
      std::size_t armMark = locals_.size();
      for (auto& b : binds) locals_.push_back(std::move(b));
      std::string ctor = arm.pattern.kind == Pattern::Kind::Ctor ? arm.pattern.name : std::string("_");
      recv_.push_back(RecvCtx{adt, ctor});
      expect(result, infer(*arm.body), arm.body->span, "receive arms must all have the same type");
      recv_.pop_back();
      if (!containsReply(*arm.body) && !endsInBreak(*arm.body)) {
        Type expected = res(replyVar(adt));
        try {
          bind(unify(expected, Type::prim(Kind::Unit)));
        } catch (const UnifyError&) {
          error(ErrorKind::NonUniformReply, arm.body->span,
                fmt::format("non-uniform reply in handler for {}: expected {}, found Unit (no reply)", ctor,
                            typeString(expected)));
        }
      }
      locals_.resize(armMark);
    }
    locals_.resize(mark);
    checkArms(e, msgType, "receive");
    return result;
  }

  void inferPattern(const Pattern& p, const Type& expected, std::vector<Local>& binds) {
    auto prim = [&](Kind k, const char* what) {
      expect(expected, Type::prim(k), p.span, fmt::format("{} pattern", what));
    };
    switch (p.kind) {
      case Pattern::Kind::Wildcard: return;
      case Pattern::Kind::Var: binds.push_back(Local{p.name, Scheme{{}, expected}}); return;
      case Pattern::Kind::Int: prim(Kind::Int, "integer"); return;
      case Pattern::Kind::Float: prim(Kind::Float, "float"); return;
      case Pattern::Kind::Bool: prim(Kind::Bool, "boolean"); return;
      case Pattern::Kind::String: prim(Kind::String, "string"); return;
      case Pattern::Kind::Unit: prim(Kind::Unit, "unit"); return;
      case Pattern::Kind::Ctor: {
        const CtorInfo& ci = ctorInfo(p.name, p.span, " in pattern");
        auto [fields, result] = instantiateCtor(ci);
        Type scrut = res(expected);
        if (scrut.kind == Kind::Named && scrut.name != ci.adt) {
          error(ErrorKind::TypeMismatch, p.span,
                fmt::format("pattern {} is a constructor of {}, but the matched value has type {}", p.name, ci.adt,
                            typeString(scrut)));
        }
        expect(expected, result, p.span, fmt::format("pattern {}", p.name));
        if (fields.size() != p.args.size()) {
          error(ErrorKind::WrongArity, p.span,
                fmt::format("constructor {} expects {} argument(s) in pattern, found {}", p.name, fields.size(),
                            p.args.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) inferPattern(p.args[i], fields[i], binds);
        return;
      }
      case Pattern::Kind::Tuple: {
        std::vector<Type> members;
        for (std::size_t i = 0; i < p.args.size(); ++i) members.push_back(fresh());
        expect(expected, Type::tuple(members), p.span, "tuple pattern");
        for (std::size_t i = 0; i < p.args.size(); ++i) inferPattern(p.args[i], members[i], binds);
        return;
      }
      case Pattern::Kind::Nil: expect(expected, Type::list(fresh()), p.span, "list pattern"); return;
      case Pattern::Kind::Cons: {
        Type elem = fresh();
        expect(expected, Type::list(elem), p.span, "list pattern");
        inferPattern(p.args[0], elem, binds);
        inferPattern(p.args[1], Type::list(elem), binds);
        return;
      }
    }
  }

  syntax::SourceProgram& prog_;
  TypeEnv env_;
  FreshSupply fresh_;
  Substitution theta_;
  std::vector<Local> locals_;
  std::map<std::string, Type> monoFns_;
  std::map<std::string, Type> fnTypes_;
  std::map<std::string, Span> fnSpans_;
  std::map<std::string, Type> actorRunTypes_;
  std::vector<RecvCtx> recv_;
  int loopDepth_ = 0;
  std::vector<DeferredSend> deferred_;
  std::map<std::string, Type>* annotationVars_ = nullptr;
  std::unordered_map<const Expr*, Type> types_;
  std::vector<Expr*> prints_;
  std::vector<Expr*> numeric_;
};

}  // namespace

TypedProgram inferProgram(syntax::SourceProgram& program) { return Inferencer(program).run(); }

TypedProgram inferExpression(syntax::SourceProgram& decls, syntax::Expr& expr, Type* result) {
  return Inferencer(decls).runExpression(expr, result);
}

}  // namespace nvlang::types
