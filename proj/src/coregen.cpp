#include "nvlang/coregen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "nvlang/diagnostics.hpp"
#include "nvlang/value.hpp"

namespace nvlang::coregen {

using anf::Anf;
using anf::Atom;
using anf::Comp;
using anf::Op;
using syntax::Pattern;

std::string mangleVar(const std::string& name) {
  if (name.empty()) return "_";
  std::string out = name;
  if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

const std::string& FunctionNames::assign(const std::string& source, int arity) {
  if (auto it = names_.find(source); it != names_.end()) return it->second;
  std::string base = repr::lowerAscii(source);
  std::string name = base;
  auto clash = [&](const std::string& n) {
    auto it = taken_.find(n);
    return it != taken_.end() && std::count(it->second.begin(), it->second.end(), arity) > 0;
  };
  for (int n = 2; clash(name); ++n) name = base + "_" + std::to_string(n);
  taken_[name].push_back(arity);
  return names_[source] = name;
}

const std::string& FunctionNames::get(const std::string& source) const {
  auto it = names_.find(source);
  if (it == names_.end()) throw InternalError("no emitted name for " + source);
  return it->second;
}

void FunctionNames::reserve(const std::string& name, int arity) { taken_[name].push_back(arity); }

std::string CoreDoc::text() const {
  std::string out = "module " + repr::quoteAtom(module) + " [";
  std::string pad(out.size(), ' ');
  for (std::size_t k = 0; k < exports.size(); ++k) {
    if (k) out += ",\n" + pad;
    out += fmt::format("{}/{}", repr::quoteAtom(exports[k].first), exports[k].second);
  }
  out += "]\n    attributes []\n";
  for (const auto& [name, fun] : definitions) out += name + " =\n    " + fun + "\n";
  return out + "end\n";
}

namespace {

std::string q(const std::string& atom) { return repr::quoteAtom(atom); }
std::string nl(int ind) { return "\n" + std::string(static_cast<std::size_t>(ind), ' '); }

std::string charList(const std::string& s) {
  if (s.empty()) return "[]";
  std::string out = "[";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(static_cast<unsigned char>(s[k]));
  }
  return out + "]";
}

std::string bif(const std::string& op, bool floatOp) {
  static const std::map<std::string, std::string> ops{{"+", "+"},    {"-", "-"},   {"*", "*"},  {"%", "rem"},
                                                      {"==", "=:="}, {"!=", "=/="}, {"<", "<"}, {"<=", "=<"},
                                                      {">", ">"},    {">=", ">="}};
  if (op == "/") return floatOp ? "/" : "div";
  auto it = ops.find(op);
  if (it == ops.end()) throw InternalError("no Core Erlang operator for " + op);
  return it->second;
}

struct GlobalInfo {
  enum class Kind { Fn, External, Crash, Actor, Supervisor };
  Kind kind = Kind::Fn;
  std::string module;
  std::string emitted;  // function name in its module
  int arity = 0;
  std::string extModule, extFunction;
};

struct Program {
  const syntax::SourceProgram& source;
  const types::TypedProgram& typed;
  const actors::ActorTable& table;
  const CoreOptions& options;
  repr::ReprTable reprs;
  FunctionNames names;
  std::map<std::string, GlobalInfo> globals;
};

class Emitter {
 public:
  Emitter(const Program& p, std::string module) : p_(p), module_(std::move(module)) {}

  std::string function(const std::vector<std::string>& params, const Anf& body) {
    std::string out = "fun (";
    for (std::size_t k = 0; k < params.size(); ++k) out += (k ? ", " : "") + mangleVar(params[k]);
    return out + ") ->" + nl(8) + expr(body, 8, false);
  }

  std::string actor(const std::string& self, const Anf& body) {
    return "fun () ->" + nl(8) + "let <" + mangleVar(self) + "> = call 'erlang':'self'() in" + nl(8) +
           expr(body, 8, false);
  }

 private:
  const Program& p_;
  std::string module_;
  int tmp_ = 0;
  int guards_ = 0;
  struct Reply {
    std::string caller, ref;
  };
  std::vector<Reply> replies_;
  std::vector<std::string> loops_;

  std::string fresh(const char* base) { return fmt::format("_@{}{}", base, ++tmp_); }

  const GlobalInfo& global(const std::string& name) const {
    auto it = p_.globals.find(name);
    if (it == p_.globals.end()) throw InternalError("unknown global " + name);
    return it->second;
  }

  std::string fname(const GlobalInfo& g) const { return fmt::format("{}/{}", q(g.emitted), g.arity); }

  std::string atom(const Atom& a) const {
    switch (a.kind) {
      case Atom::Kind::Var: return mangleVar(a.name);
      case Atom::Kind::Int: return std::to_string(a.intValue);
      case Atom::Kind::Float: return rt::Renderer::formatFloat(a.floatValue);
      case Atom::Kind::Bool: return a.boolValue ? "'true'" : "'false'";
      case Atom::Kind::String: return charList(a.name);
      case Atom::Kind::Unit: return q(repr::kUnitAtom);
      case Atom::Kind::Global: {
        const GlobalInfo& g = global(a.name);
        switch (g.kind) {
          case GlobalInfo::Kind::Fn:
            if (g.module == module_) return fname(g);
            return fmt::format("call 'erlang':'make_fun'({}, {}, {})", q(g.module), q(g.emitted), g.arity);
          case GlobalInfo::Kind::External:
            return fmt::format("call 'erlang':'make_fun'({}, {}, {})", q(g.extModule), q(g.extFunction), g.arity);
          case GlobalInfo::Kind::Crash: return "call 'erlang':'make_fun'('erlang', 'error', 1)";
          default: break;
        }
        throw InternalError("global " + a.name + " is not a value");
      }
    }
    return "";
  }

  std::string args(const std::vector<Atom>& as, std::size_t from = 0) const {
    std::string out;
    for (std::size_t k = from; k < as.size(); ++k) out += (k > from ? ", " : "") + atom(as[k]);
    return out;
  }

  std::string pattern(const Pattern& p) {
    switch (p.kind) {
      case Pattern::Kind::Wildcard: return fresh("w");
      case Pattern::Kind::Var: return p.name == "_" ? fresh("w") : mangleVar(p.name);
      case Pattern::Kind::Int: return std::to_string(p.intValue);
      case Pattern::Kind::Float: return rt::Renderer::formatFloat(p.floatValue);
      case Pattern::Kind::Bool: return p.boolValue ? "'true'" : "'false'";
      case Pattern::Kind::String: return charList(p.name);
      case Pattern::Kind::Unit: return q(repr::kUnitAtom);
      case Pattern::Kind::Nil: return "[]";
      case Pattern::Kind::Cons: return "[" + pattern(p.args[0]) + "|" + pattern(p.args[1]) + "]";
      case Pattern::Kind::Ctor: {
        std::string tag = q(p_.reprs.atom(p.name));
        if (p.args.empty()) return tag;
        std::string out = "{" + tag;
        for (const auto& a : p.args) out += ", " + pattern(a);
        return out + "}";
      }
      case Pattern::Kind::Tuple: {
        std::string out = "{";
        for (std::size_t k = 0; k < p.args.size(); ++k) out += (k ? ", " : "") + pattern(p.args[k]);
        return out + "}";
      }
    }
    return "_";
  }

  // Chains print flat: `let <X> = c in` / `do c` lines followed by the rest.
  std::string expr(const Anf& e, int ind, bool loopTail) {
    if (e.kind == Anf::Kind::Tail) return comp(e.comp, ind, loopTail);
    if (e.name == "_" && e.comp.op == Op::Reply) return replySend(e.comp) + nl(ind) + expr(*e.body, ind, loopTail);
    std::string value = comp(e.comp, ind + 4, false);
    bool multi = value.find('\n') != std::string::npos;
    std::string head;
    if (e.name == "_") {
      head = multi ? "do" + nl(ind + 4) + value : "do " + value;
    } else {
      head = "let <" + mangleVar(e.name) + "> =" + (multi ? nl(ind + 4) : " ") + value + " in";
    }
    return head + nl(ind) + expr(*e.body, ind, loopTail);
  }

  // A computation in the tail of a loop body recurses into the loop after it.
  std::string continueLoop(const Comp& c, int ind) {
    std::string again = "apply " + q(loops_.back()) + "/0()";
    if (c.op == Op::Reply) return replySend(c) + nl(ind) + again;
    std::string text = simple(c, ind + 4);
    if (text.find('\n') != std::string::npos) return "do" + nl(ind + 4) + text + nl(ind) + again;
    return "do " + text + nl(ind) + again;
  }

  std::string replySend(const Comp& c) {
    if (replies_.empty()) throw InternalError("reply outside a receive arm");
    const Reply& r = replies_.back();
    std::string msg = p_.options.plainWireFormat ? fmt::format("{{'response', {}}}", atom(c.args[0]))
                                                 : fmt::format("{{'response', {}, {}}}", r.ref, atom(c.args[0]));
    return fmt::format("do call 'erlang':'!'({}, {})", r.caller, msg);
  }

  std::string comp(const Comp& c, int ind, bool loopTail) {
    switch (c.op) {
      case Op::If: return ifExpr(c, ind, loopTail);
      case Op::Case: return caseExpr(c, ind, loopTail);
      case Op::Block: return expr(*c.body, ind, loopTail);
      case Op::Receive: return receive(c, ind, loopTail);
      case Op::Break:
        if (!loopTail) throw InternalError("break outside the tail of a loop body");
        return q(repr::kUnitAtom);
      default: return loopTail ? continueLoop(c, ind) : simple(c, ind);
    }
  }

  std::string simple(const Comp& c, int ind) {
    switch (c.op) {
      case Op::Atom: return atom(c.args[0]);
      case Op::Call: return call(c);
      case Op::Ctor: {
        std::string tag = q(p_.reprs.atom(c.text));
        return c.args.empty() ? tag : "{" + tag + ", " + args(c.args) + "}";
      }
      case Op::Binary:
        return fmt::format("call 'erlang':{}({})", q(bif(c.text, c.floatOp)), args(c.args));
      case Op::Unary:
        return fmt::format("call 'erlang':{}({})", c.text == "not" ? "'not'" : "'-'", args(c.args));
      case Op::Tuple: return "{" + args(c.args) + "}";
      case Op::List: return "[" + args(c.args) + "]";
      case Op::Cons: return "[" + atom(c.args[0]) + "|" + atom(c.args[1]) + "]";
      case Op::Lambda: {
        auto saved = std::move(loops_);
        loops_.clear();
        std::string out = "fun (";
        for (std::size_t k = 0; k < c.params.size(); ++k) out += (k ? ", " : "") + mangleVar(c.params[k]);
        out += ") ->" + nl(ind + 4) + expr(*c.body, ind + 4, false);
        loops_ = std::move(saved);
        return out;
      }
      case Op::Spawn: return spawn(c.text, ind);
      case Op::Send: return send(c, ind);
      case Op::Await: return await(c, ind);
      case Op::Reply: return replySend(c) + nl(ind) + q(repr::kUnitAtom);
      case Op::Loop: {
        std::string name = fresh("loop");
        loops_.push_back(name);
        std::string body = expr(*c.body, ind + 8, true);
        loops_.pop_back();
        return "letrec " + q(name) + "/0 =" + nl(ind + 4) + "fun () ->" + nl(ind + 8) + body + nl(ind) + "in apply " +
               q(name) + "/0()";
      }
      case Op::Print: {
        const char* fmtString = c.printsString ? "~s~n" : "~p~n";
        return fmt::format("call 'io':'format'({}, [{}])", charList(fmtString), atom(c.args[0]));
      }
      default: break;
    }
    throw InternalError("unexpected computation in code generation");
  }

  std::string call(const Comp& c) {
    const Atom& callee = c.args[0];
    if (callee.kind == Atom::Kind::Var) return fmt::format("apply {}({})", mangleVar(callee.name), args(c.args, 1));
    if (callee.kind != Atom::Kind::Global) throw InternalError("call of a literal");
    const GlobalInfo& g = global(callee.name);
    switch (g.kind) {
      case GlobalInfo::Kind::Fn:
        if (g.module == module_) return fmt::format("apply {}({})", fname(g), args(c.args, 1));
        return fmt::format("call {}:{}({})", q(g.module), q(g.emitted), args(c.args, 1));
      case GlobalInfo::Kind::External:
        return fmt::format("call {}:{}({})", q(g.extModule), q(g.extFunction), args(c.args, 1));
      case GlobalInfo::Kind::Crash: return fmt::format("call 'erlang':'error'({})", args(c.args, 1));
      default: break;
    }
    throw InternalError("call of " + callee.name);
  }

  std::string spawn(const std::string& name, int ind) {
    const GlobalInfo& g = global(name);
    if (g.kind == GlobalInfo::Kind::Supervisor) {
      std::string pid = fresh("sup");
      return fmt::format("case call 'supervisor':'start_link'({}, {}) of", q(g.module), q(g.emitted)) + nl(ind + 2) +
             fmt::format("<{{'ok', {}}}> when 'true' ->", pid) + nl(ind + 4) + pid + nl(ind) + "end";
    }
    if (g.module == module_) return fmt::format("call 'erlang':'spawn'({})", fname(g));
    return fmt::format("call 'erlang':'spawn'({}, {}, [])", q(g.module), q(g.emitted));
  }

  std::string send(const Comp& c, int ind) {
    std::string target = atom(c.args[0]);
    std::string msg = atom(c.args[1]);
    std::string self = fresh("self");
    std::string out = "let <" + self + "> = call 'erlang':'self'() in" + nl(ind);
    if (p_.options.plainWireFormat) {
      return out + fmt::format("do call 'erlang':'!'({}, {{{}, {}}})", target, self, msg) + nl(ind) +
             fmt::format("{{'future', {}}}", target);
    }
    std::string ref = fresh("ref");
    return out + "let <" + ref + "> = call 'erlang':'make_ref'() in" + nl(ind) +
           fmt::format("do call 'erlang':'!'({}, {{{}, {}, {}}})", target, self, ref, msg) + nl(ind) +
           fmt::format("{{'future', {}, {}}}", target, ref);
  }

  std::string await(const Comp& c, int ind) {
    std::string future = atom(c.args[0]);
    std::string value = fresh("v");
    std::string clause;
    std::string futurePat;
    if (p_.options.plainWireFormat) {
      futurePat = fmt::format("{{'future', {}}}", fresh("t"));
      clause = fmt::format("<{{'response', {}}}> when 'true' ->", value);
    } else {
      std::string ref = fresh("ref");
      std::string got = fresh("r");
      futurePat = fmt::format("{{'future', {}, {}}}", fresh("t"), ref);
      clause = fmt::format("<{{'response', {}, {}}}> when call 'erlang':'=:='({}, {}) ->", got, value, got, ref);
    }
    return "case " + future + " of" + nl(ind + 2) + "<" + futurePat + "> when 'true' ->" + nl(ind + 4) + "receive" +
           nl(ind + 6) + clause + nl(ind + 8) + value + nl(ind + 4) + "after 'infinity' ->" + nl(ind + 6) + "'true'" +
           nl(ind) + "end";
  }

  std::string ifExpr(const Comp& c, int ind, bool loopTail) {
    std::string then = expr(*c.body, ind + 4, loopTail);
    std::string otherwise = expr(*c.elseBody, ind + 4, loopTail);
    if (c.guard) {
      const auto& g = *c.guard;
      std::string first = guards_++ == 0 ? "_G" : fmt::format("_G{}", 2 * guards_ - 1);
      std::string second = fmt::format("_G{}", 2 * guards_);
      return "case " + atom(g.lhs) + " of" + nl(ind + 2) +
             fmt::format("<{}> when call 'erlang':{}({}, {}) ->", first, q(bif(g.op, g.floatOp)), first,
                         atom(g.rhs)) +
             nl(ind + 4) + then + nl(ind + 2) + "<" + second + "> when 'true' ->" + nl(ind + 4) + otherwise + nl(ind) +
             "end";
    }
    return "case " + atom(c.args[0]) + " of" + nl(ind + 2) + "<'true'> when 'true' ->" + nl(ind + 4) + then +
           nl(ind + 2) + "<'false'> when 'true' ->" + nl(ind + 4) + otherwise + nl(ind) + "end";
  }

  std::string arms(const std::vector<anf::AnfArm>& as, int ind, bool loopTail) {
    std::string out;
    for (const auto& a : as) {
      out += nl(ind) + "<" + pattern(a.pattern) + "> when 'true' ->" + nl(ind + 2) + expr(*a.body, ind + 2, loopTail);
    }
    return out;
  }

  std::string caseExpr(const Comp& c, int ind, bool loopTail) {
    std::string fail = fresh("f");
    return "case " + atom(c.args[0]) + " of" + arms(c.arms, ind + 2, loopTail) + nl(ind + 2) + "<" + fail +
           "> when 'true' ->" + nl(ind + 4) + "primop 'match_fail'({'case_clause', " + fail + "})" + nl(ind) + "end";
  }

  std::string receive(const Comp& c, int ind, bool loopTail) {
    std::string caller = fresh("caller");
    std::string ref = p_.options.plainWireFormat ? "" : fresh("ref");
    std::string msg = c.text.empty() ? fresh("msg") : mangleVar(c.text);
    std::string wire = p_.options.plainWireFormat ? fmt::format("{{{}, {}}}", caller, msg)
                                                  : fmt::format("{{{}, {}, {}}}", caller, ref, msg);
    replies_.push_back(Reply{caller, ref});
    std::string body = "case " + msg + " of" + arms(c.arms, ind + 6, loopTail) + nl(ind + 4) + "end";
    replies_.pop_back();
    return "receive" + nl(ind + 2) + "<" + wire + "> when call 'erlang':'is_pid'(" + caller + ") ->" + nl(ind + 4) +
           body + nl(ind) + "after 'infinity' ->" + nl(ind + 2) + "'true'";
  }
};

std::string moduleOf(const syntax::Decl& d, const CoreOptions& options) {
  return d.module.empty() ? options.defaultModule : d.module;
}

std::string strategyAtom(syntax::Strategy s) {
  switch (s) {
    case syntax::Strategy::OneForOne: return "one_for_one";
    case syntax::Strategy::OneForAll: return "one_for_all";
    case syntax::Strategy::RestForOne: return "rest_for_one";
  }
  return "one_for_one";
}

std::string policyAtom(syntax::RestartPolicy p) {
  switch (p) {
    case syntax::RestartPolicy::Permanent: return "permanent";
    case syntax::RestartPolicy::Transient: return "transient";
    case syntax::RestartPolicy::Temporary: return "temporary";
  }
  return "permanent";
}

}  // namespace

std::vector<CoreDoc> emitProgram(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                                 const actors::ActorTable& table, const CoreOptions& options) {
  Program p{program, typed, table, options, repr::ReprTable::build(typed.env), {}, {}};
  std::vector<std::string> modules;
  std::set<std::string> withSupervisors;
  for (const auto& d : program.decls) {
    std::string m = moduleOf(d, options);
    if (std::find(modules.begin(), modules.end(), m) == modules.end()) modules.push_back(m);
    if (std::holds_alternative<syntax::SupervisorDecl>(d.node)) withSupervisors.insert(m);
  }
  if (modules.empty()) modules.push_back(options.defaultModule);
  p.names.reserve("module_info", 0);
  p.names.reserve("module_info", 1);
  if (!withSupervisors.empty()) p.names.reserve("init", 1);

  p.globals["crash"] = GlobalInfo{GlobalInfo::Kind::Crash, "", "", 1, "", ""};
  for (const auto& d : program.decls) {
    std::string m = moduleOf(d, options);
    if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
      int n = static_cast<int>(f->params.size());
      p.globals[f->name] = GlobalInfo{GlobalInfo::Kind::Fn, m, p.names.assign(f->name, n), n, "", ""};
    } else if (const auto* a = std::get_if<syntax::ActorDecl>(&d.node)) {
      p.globals[a->name] = GlobalInfo{GlobalInfo::Kind::Actor, m, p.names.assign(a->name + "_run", 0), 0, "", ""};
    } else if (const auto* s = std::get_if<syntax::SupervisorDecl>(&d.node)) {
      p.globals[s->name] = GlobalInfo{GlobalInfo::Kind::Supervisor, m, repr::lowerAscii(s->name), 0, "", ""};
    } else if (const auto* e = std::get_if<syntax::ExternalDecl>(&d.node)) {
      p.globals[e->name] = GlobalInfo{GlobalInfo::Kind::External, m, "", e->arity, e->module, e->function};
    }
  }

  std::vector<CoreDoc> docs;
  for (const auto& m : modules) {
    CoreDoc doc;
    doc.module = m;
    Emitter em(p, m);
    std::map<std::string, std::string> startLinks;  // child name -> helper function
    std::vector<const syntax::SupervisorDecl*> sups;
    for (const auto& d : program.decls) {
      if (moduleOf(d, options) != m) continue;
      if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
        const auto& g = p.globals.at(f->name);
        std::vector<std::string> params;
        for (const auto& prm : f->params) params.push_back(prm.name);
        auto body = anf::markGuards(anf::toAnf(*f->body, options.order));
        doc.definitions.emplace_back(fmt::format("{}/{}", q(g.emitted), g.arity), em.function(params, *body));
        doc.exports.emplace_back(g.emitted, g.arity);
      } else if (const auto* a = std::get_if<syntax::ActorDecl>(&d.node)) {
        const auto& g = p.globals.at(a->name);
        auto body = anf::markGuards(anf::toAnf(*a->runBody, options.order));
        doc.definitions.emplace_back(fmt::format("{}/0", q(g.emitted)), em.actor(a->selfName, *body));
        doc.exports.emplace_back(g.emitted, 0);
      } else if (const auto* s = std::get_if<syntax::SupervisorDecl>(&d.node)) {
        sups.push_back(s);
      }
    }
    if (!sups.empty()) {
      std::string init = "fun (_@name) ->" + nl(8) + "case _@name of";
      for (const auto* s : sups) {
        const auto& spec = table.supervisors.at(s->name);
        std::string children;
        for (const auto& c : spec.children) {
          const auto& child = p.globals.at(c.actor);
          if (!startLinks.count(c.actor)) {
            std::string helper = p.names.assign(c.actor + "_start_link", 0);
            std::string text;
            if (c.isSupervisor) {
              text = fmt::format("fun () ->{}call 'supervisor':'start_link'({}, {})", nl(8), q(child.module),
                                 q(child.emitted));
            } else {
              std::string runner = child.module == m ? fmt::format("{}/0", q(child.emitted))
                                                     : fmt::format("call 'erlang':'make_fun'({}, {}, 0)",
                                                                   q(child.module), q(child.emitted));
              text = fmt::format("fun () ->{}let <_@pid> = call 'erlang':'spawn_link'({}) in{}{{'ok', _@pid}}", nl(8),
                                 runner, nl(8));
            }
            doc.definitions.emplace_back(fmt::format("{}/0", q(helper)), text);
            doc.exports.emplace_back(helper, 0);
            startLinks[c.actor] = helper;
          }
          if (!children.empty()) children += "," + nl(16);
          children += fmt::format("{{{}, {{{}, {}, []}}, {}, {}, {}, [{}]}}", q(c.id), q(m), q(startLinks[c.actor]),
                                  q(policyAtom(c.policy)), c.isSupervisor ? "'infinity'" : "'brutal_kill'",
                                  c.isSupervisor ? "'supervisor'" : "'worker'", q(child.module));
        }
        init += nl(10) + fmt::format("<{}> when 'true' ->", q(p.globals.at(s->name).emitted)) + nl(12) +
                fmt::format("{{'ok', {{{{{}, {}, {}}},", q(strategyAtom(s->strategy)), spec.maxRestarts, spec.window) +
                nl(15) + "[" + children + "]}}";
      }
      init += nl(8) + "end";
      doc.definitions.emplace_back("'init'/1", init);
      doc.exports.emplace_back("init", 1);
    }
    std::sort(doc.exports.begin(), doc.exports.end());
    std::sort(doc.definitions.begin(), doc.definitions.end());
    docs.push_back(std::move(doc));
  }
  return docs;
}

CoreDoc emitModule(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                   const actors::ActorTable& table, const CoreOptions& options) {
  auto docs = emitProgram(program, typed, table, options);
  if (docs.size() != 1) throw InternalError(fmt::format("expected one module, found {}", docs.size()));
  return std::move(docs.front());
}

bool erlcAvailable() { return std::system("command -v erlc >/dev/null 2>&1") == 0; }

ErlcResult validateWithErlc(const CoreDoc& doc, const std::filesystem::path& workDir) {
  ErlcResult r;
  if (!erlcAvailable()) return r;
  r.available = true;
  std::filesystem::create_directories(workDir);
  auto file = workDir / (doc.module + ".core");
  std::ofstream(file) << doc.text();
  std::string cmd = fmt::format("cd '{}' && erlc +from_core '{}' 2>&1", workDir.string(), file.filename().string());
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.log += buf;
  r.ok = pclose(pipe) == 0;
  return r;
}

}  // namespace nvlang::coregen
