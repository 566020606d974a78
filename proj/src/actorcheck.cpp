#include "nvlang/actorcheck.hpp"

#include <fmt/format.h>

#include <functional>

namespace nvlang::actors {

using syntax::Expr;
using syntax::ExprKind;
using syntax::Pattern;

namespace {

void collectReplies(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == ExprKind::Reply) out.push_back(e.children[0].get());
  if (e.kind == ExprKind::Lambda || e.kind == ExprKind::Receive) return;
  for (const auto& c : e.children) {
    if (c) collectReplies(*c, out);
  }
  for (const auto& a : e.arms) collectReplies(*a.body, out);
}

bool endsInBreak(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Break: return true;
    case ExprKind::Seq: return endsInBreak(*e.children.back());
    case ExprKind::Let: return endsInBreak(*e.children[1]);
    case ExprKind::If: return endsInBreak(*e.children[1]) || endsInBreak(*e.children[2]);
    case ExprKind::Case:
      for (const auto& a : e.arms) {
        if (endsInBreak(*a.body)) return true;
      }
      return false;
    default: return false;
  }
}

// Receive blocks reachable from `root`, following calls to top-level functions.
std::vector<const Expr*> reachableReceives(const syntax::SourceProgram& program, const Expr& root) {
  std::map<std::string, const Expr*> fns;
  for (const auto& d : program.decls) {
    if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) fns[f->name] = f->body.get();
  }
  std::vector<const Expr*> out;
  std::set<std::string> visited;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == ExprKind::Receive) out.push_back(&e);
    if (e.kind == ExprKind::Var && e.globalRef) {
      auto it = fns.find(e.text);
      if (it != fns.end() && visited.insert(e.text).second) walk(*it->second);
    }
    for (const auto& c : e.children) {
      if (c) walk(*c);
    }
    for (const auto& a : e.arms) walk(*a.body);
  };
  walk(root);
  return out;
}

// break may only end a loop body; anywhere else it would skip code.
void checkBreaks(const Expr& e, bool inLoop, bool tail) {
  if (e.kind == ExprKind::Break && inLoop && !tail) {
    throw CompileError(ErrorKind::BreakOutsideLoop, e.span, "break must be the last expression of a loop body");
  }
  switch (e.kind) {
    case ExprKind::Loop: checkBreaks(*e.children[0], true, true); return;
    case ExprKind::Lambda: checkBreaks(*e.children[0], false, false); return;
    case ExprKind::Seq:
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        checkBreaks(*e.children[i], inLoop, tail && i + 1 == e.children.size());
      }
      return;
    case ExprKind::Let:
      checkBreaks(*e.children[0], inLoop, false);
      checkBreaks(*e.children[1], inLoop, tail);
      return;
    case ExprKind::If:
      checkBreaks(*e.children[0], inLoop, false);
      checkBreaks(*e.children[1], inLoop, tail);
      checkBreaks(*e.children[2], inLoop, tail);
      return;
    case ExprKind::Case:
    case ExprKind::Receive:
      for (const auto& c : e.children) checkBreaks(*c, inLoop, false);
      for (const auto& a : e.arms) checkBreaks(*a.body, inLoop, tail);
      return;
    default:
      for (const auto& c : e.children) {
        if (c) checkBreaks(*c, inLoop, false);
      }
  }
}

}  // namespace

ActorInfo analyzeActor(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                       const syntax::ActorDecl& actor) {
  const auto& env = typed.env;
  ActorInfo info;
  info.name = actor.name;
  info.messageType = env.actors.at(actor.name).messageType;
  const auto& adt = env.adts.at(info.messageType.name);
  info.uniformReply = env.replyTypes.count(adt.name) ? env.replyTypes.at(adt.name) : Type::prim(types::Kind::Unit);

  for (const Expr* recv : reachableReceives(program, *actor.runBody)) {
    std::set<std::string> covered;
    for (const auto& arm : recv->arms) {
      std::vector<std::string> ctors;
      if (arm.pattern.kind == Pattern::Kind::Ctor) {
        ctors.push_back(arm.pattern.name);
      } else {
        for (const auto& c : adt.ctors) {
          if (!covered.count(c)) ctors.push_back(c);
        }
      }
      std::vector<const Expr*> replies;
      collectReplies(*arm.body, replies);
      bool terminating = replies.empty() && endsInBreak(*arm.body);
      for (const auto& c : ctors) {
        covered.insert(c);
        if (terminating) {
          if (!info.replyMap.count(c)) info.terminating.insert(c);
          continue;
        }
        info.terminating.erase(c);
        Type r = replies.empty() ? Type::prim(types::Kind::Unit) : typed.typeOf(*replies.front());
        info.replyMap.emplace(c, r);
      }
    }
  }
  for (const auto& [ctor, t] : info.replyMap) {
    if (!(t == info.uniformReply) && t.kind != types::Kind::Any && info.uniformReply.kind != types::Kind::Any) {
      throw CompileError(ErrorKind::NonUniformReply, Span{},
                         fmt::format("non-uniform reply in handler for {}: expected {}, found {}", ctor,
                                     types::typeString(info.uniformReply), types::typeString(t)));
    }
  }
  return info;
}

SupervisorSpec checkSupervisor(const types::TypedProgram& typed, const syntax::SupervisorDecl& sup, Span span) {
  SupervisorSpec spec;
  spec.name = sup.name;
  spec.strategy = sup.strategy;
  if (sup.restartLimit) {
    spec.maxRestarts = sup.restartLimit->first;
    spec.window = sup.restartLimit->second;
    if (spec.maxRestarts < 0 || spec.window <= 0) {
      throw CompileError(ErrorKind::TypeMismatch, span,
                         fmt::format("supervisor {}: restart limit needs a non-negative count and a positive window",
                                     sup.name));
    }
  }
  std::set<std::string> ids;
  for (const auto& c : sup.children) {
    if (!ids.insert(c.id).second) {
      throw CompileError(ErrorKind::DuplicateChildId, c.span,
                         fmt::format("supervisor {} declares child '{}' twice", sup.name, c.id));
    }
    auto it = typed.env.actors.find(c.actor);
    if (it == typed.env.actors.end()) {
      throw CompileError(ErrorKind::UnknownActorChild, c.span,
                         fmt::format("child '{}' of supervisor {}: '{}' is not an actor", c.id, sup.name, c.actor));
    }
    if (!c.args.empty()) {
      std::string found;
      for (const auto& a : c.args) found += (found.empty() ? "" : ", ") + types::typeString(typed.typeOf(*a));
      throw CompileError(ErrorKind::ChildArgTypeMismatch, c.span,
                         fmt::format("child '{}' of supervisor {}: {} expects no arguments, found ({})", c.id,
                                     sup.name, c.actor, found));
    }
    spec.children.push_back(ChildSpec{c.id, c.actor, it->second.supervisor, c.policy});
  }
  return spec;
}

ActorTable checkActors(const syntax::SourceProgram& program, const types::TypedProgram& typed) {
  ActorTable table;
  for (const auto& d : program.decls) {
    if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) checkBreaks(*f->body, false, false);
    if (const auto* a = std::get_if<syntax::ActorDecl>(&d.node)) {
      checkBreaks(*a->runBody, false, false);
      table.actors.emplace(a->name, analyzeActor(program, typed, *a));
    }
    if (const auto* s = std::get_if<syntax::SupervisorDecl>(&d.node)) {
      table.supervisors.emplace(s->name, checkSupervisor(typed, *s, d.span));
    }
  }
  return table;
}

Type replyTypeOf(const ActorInfo& info, const std::string& ctor) {
  if (auto it = info.replyMap.find(ctor); it != info.replyMap.end()) return it->second;
  if (info.terminating.count(ctor)) return info.uniformReply;
  throw CompileError(ErrorKind::UnknownConstructor, Span{},
                     fmt::format("'{}' is not a message of actor {}", ctor, info.name));
}

std::vector<std::size_t> restartSet(syntax::Strategy strategy, std::size_t childCount, std::size_t failed) {
  std::vector<std::size_t> out;
  switch (strategy) {
    case syntax::Strategy::OneForOne: out.push_back(failed); break;
    case syntax::Strategy::OneForAll:
      for (std::size_t i = 0; i < childCount; ++i) out.push_back(i);
      break;
    case syntax::Strategy::RestForOne:
      for (std::size_t i = failed; i < childCount; ++i) out.push_back(i);
      break;
  }
  return out;
}

bool restartsAfter(syntax::RestartPolicy policy, bool abnormal) {
  switch (policy) {
    case syntax::RestartPolicy::Permanent: return true;
    case syntax::RestartPolicy::Transient: return abnormal;
    case syntax::RestartPolicy::Temporary: return false;
  }
  return false;
}

}  // namespace nvlang::actors
