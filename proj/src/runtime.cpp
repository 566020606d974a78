#include "nvlang/runtime.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <unordered_map>

#include "nvlang/anf.hpp"
#include "nvlang/value_repr.hpp"

namespace nvlang::rt {

using syntax::Expr;
using syntax::ExprKind;
using syntax::Pattern;

std::string statusName(RunResult::Status s) {
  switch (s) {
    case RunResult::Status::Normal: return "normal";
    case RunResult::Status::Crashed: return "crashed";
    case RunResult::Status::Deadlock: return "deadlock";
    case RunResult::Status::StepLimit: return "step-limit";
  }
  return "?";
}

std::string traceJsonl(const std::vector<Event>& trace) {
  std::string out;
  for (const auto& e : trace) {
    nlohmann::ordered_json j;
    j["tick"] = e.tick;
    j["kind"] = e.kind;
    j["pid"] = e.pid;
    j["detail"] = e.detail;
    out += j.dump() + "\n";
  }
  return out;
}

enum class NK : std::uint8_t {
  Lit, Local, Global, Ctor, Call, Lambda, Let, LetPat, If, Case, Binary, AndOr, Unary,
  List, Tuple, Cons, Spawn, Send, Await, Reply, Receive, Loop, Break, Seq, Print,
};

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Rem, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Pat {
  Pattern::Kind kind = Pattern::Kind::Wildcard;
  int sym = -1;
  int tag = -1;
  Value lit;
  std::vector<const Pat*> args;
};

struct Node {
  NK k = NK::Lit;
  Value lit;
  int sym = -1;
  int index = -1;
  BinOp op = BinOp::Add;
  bool flag = false;  // Print: argument is a String; Unary: `not`
  std::string name;
  std::vector<const Node*> kids;
  std::vector<std::pair<const Pat*, const Node*>> arms;
  std::vector<int> params;
  const Pat* pat = nullptr;
};

namespace {

struct Fault {
  std::string reason;
  bool deadlock = false;
};

[[noreturn]] void stuck(const std::string& what) { throw InternalError("interpreter reached a stuck state: " + what); }

enum class GlobalKind { User, External, Crash };

struct Global {
  std::string name;
  GlobalKind kind = GlobalKind::User;
  std::vector<int> params;
  const Node* body = nullptr;
  std::string mfa;
  int arity = 0;
};

struct Message {
  bool response = false;
  std::int64_t sender = 0;
  std::int64_t ref = 0;
  Value value;
};

enum class PStatus { Runnable, BlockedReceive, BlockedAwait, Idle, Exited };
enum class Mode { Eval, Return, Receive, Await };
enum class FK : std::uint8_t { Args, Let, LetPat, If, Case, AndOr, Seq, Loop };

struct Frame {
  FK k;
  const Node* node;
  EnvPtr env;
  std::uint32_t index = 0;
  std::vector<Value> vals;
};

struct Notice {
  std::int64_t child;
  bool abnormal;
};

struct SupState {
  const actors::SupervisorSpec* spec = nullptr;
  std::vector<std::int64_t> kids;
  std::deque<std::uint64_t> restarts;
  std::deque<Notice> notices;
};

struct Process {
  std::int64_t pid = 0;
  std::string name;
  PStatus status = PStatus::Runnable;
  Mode mode = Mode::Eval;
  const Node* node = nullptr;
  EnvPtr env;
  Value value;
  std::vector<Frame> stack;
  std::deque<Message> mailbox;
  std::int64_t awaitTarget = 0;
  std::int64_t awaitRef = 0;
  std::optional<std::int64_t> parent;
  const actors::ActorInfo* info = nullptr;
  std::unique_ptr<SupState> sup;
  bool crashed = false;
  bool deadlockFault = false;
  std::string reason;
};

}  // namespace

struct Machine::Impl {
  const syntax::SourceProgram& program;
  const types::TypedProgram& typed;
  const actors::ActorTable& table;
  RunOptions options;
  repr::ReprTable reprs;

  std::deque<Node> nodes;
  std::deque<Pat> pats;
  std::unordered_map<std::string, int> symbols;
  std::vector<Global> globals;
  std::unordered_map<std::string, int> globalIndex;
  std::vector<std::string> ctorNames;
  std::unordered_map<std::string, int> ctorTags;
  std::map<std::string, const Node*> actorBodies;
  std::map<std::string, int> actorSelf;
  int replySym = -1;

  std::vector<std::unique_ptr<Process>> procs;  // index = pid
  std::int64_t root = -1;
  std::uint64_t tick = 0;
  std::uint64_t steps = 0;
  std::int64_t refs = 0;
  std::uint64_t messages = 0;
  bool stepLimit = false;
  std::string output;
  std::vector<Event> trace;
  std::mt19937_64 rng;

  Impl(const syntax::SourceProgram& p, const types::TypedProgram& t, const actors::ActorTable& a, RunOptions o)
      : program(p), typed(t), table(a), options(std::move(o)), reprs(repr::ReprTable::build(t.env)), rng(options.seed) {
    procs.emplace_back();  // pid 0 is unused
    replySym = intern("$reply");
    for (const auto& [name, _] : typed.env.ctors) {
      ctorTags[name] = static_cast<int>(ctorNames.size());
      ctorNames.push_back(name);
    }
    loadGlobals();
  }

  // ---- loading -------------------------------------------------------------

  int intern(const std::string& s) {
    auto [it, fresh] = symbols.emplace(s, static_cast<int>(symbols.size()));
    return it->second;
  }

  void addGlobal(Global g) {
    globalIndex[g.name] = static_cast<int>(globals.size());
    globals.push_back(std::move(g));
  }

  void loadGlobals() {
    addGlobal(Global{"crash", GlobalKind::Crash, {}, nullptr, "", 1});
    for (const auto& d : program.decls) {
      if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
        Global g{f->name, GlobalKind::User, {}, nullptr, "", static_cast<int>(f->params.size())};
        for (const auto& p : f->params) g.params.push_back(intern(p.name));
        addGlobal(std::move(g));
      } else if (const auto* e = std::get_if<syntax::ExternalDecl>(&d.node)) {
        addGlobal(Global{e->name, GlobalKind::External, {}, nullptr,
                         fmt::format("{}:{}/{}", e->module, e->function, e->arity), e->arity});
      }
    }
    for (const auto& d : program.decls) {
      if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
        globals[static_cast<std::size_t>(globalIndex.at(f->name))].body = compile(*f->body);
      } else if (const auto* a = std::get_if<syntax::ActorDecl>(&d.node)) {
        actorSelf[a->name] = intern(a->selfName);
        actorBodies[a->name] = compile(*a->runBody);
      }
    }
  }

  const Pat* compilePat(const Pattern& p) {
    Pat& out = pats.emplace_back();
    out.kind = p.kind;
    switch (p.kind) {
      case Pattern::Kind::Var: out.sym = intern(p.name); break;
      case Pattern::Kind::Int: out.lit = Value::integer(p.intValue); break;
      case Pattern::Kind::Float: out.lit = Value::floating(p.floatValue); break;
      case Pattern::Kind::Bool: out.lit = Value::boolean(p.boolValue); break;
      case Pattern::Kind::String: out.lit = Value::string(p.name); break;
      case Pattern::Kind::Ctor: out.tag = ctorTags.at(p.name); break;
      default: break;
    }
    for (const auto& a : p.args) out.args.push_back(compilePat(a));
    return &out;
  }

  static BinOp binOp(const std::string& op) {
    static const std::map<std::string, BinOp> ops{
        {"+", BinOp::Add}, {"-", BinOp::Sub}, {"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Rem},
        {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"<", BinOp::Lt},  {"<=", BinOp::Le}, {">", BinOp::Gt},
        {">=", BinOp::Ge}, {"&&", BinOp::And}, {"||", BinOp::Or}};
    return ops.at(op);
  }

  const Node* compile(const Expr& e) {
    Node& n = nodes.emplace_back();
    auto kids = [&] {
      for (const auto& c : e.children) n.kids.push_back(compile(*c));
    };
    switch (e.kind) {
      case ExprKind::IntLit: n.lit = Value::integer(e.intValue); break;
      case ExprKind::FloatLit: n.lit = Value::floating(e.floatValue); break;
      case ExprKind::BoolLit: n.lit = Value::boolean(e.boolValue); break;
      case ExprKind::StringLit: n.lit = Value::string(e.text); break;
      case ExprKind::UnitLit: break;
      case ExprKind::Var:
        if (e.globalRef) {
          n.k = NK::Global;
          auto it = globalIndex.find(e.text);
          if (it == globalIndex.end()) stuck("unknown global " + e.text);
          n.index = it->second;
        } else {
          n.k = NK::Local;
          n.sym = intern(e.text);
        }
        n.name = e.text;
        break;
      case ExprKind::Ctor:
        n.k = NK::Ctor;
        n.index = ctorTags.at(e.text);
        kids();
        break;
      case ExprKind::Call: n.k = NK::Call; kids(); break;
      case ExprKind::Lambda:
        n.k = NK::Lambda;
        for (const auto& p : e.params) n.params.push_back(intern(p.name));
        kids();
        break;
      case ExprKind::Let:
        if (e.pattern->kind == Pattern::Kind::Var || e.pattern->kind == Pattern::Kind::Wildcard) {
          n.k = NK::Let;
          n.sym = e.pattern->kind == Pattern::Kind::Var ? intern(e.pattern->name) : -1;
        } else {
          n.k = NK::LetPat;
          n.pat = compilePat(*e.pattern);
        }
        kids();
        break;
      case ExprKind::If: n.k = NK::If; kids(); break;
      case ExprKind::Case:
        n.k = NK::Case;
        kids();
        for (const auto& a : e.arms) n.arms.emplace_back(compilePat(a.pattern), compile(*a.body));
        break;
      case ExprKind::Binary:
        n.op = binOp(e.text);
        n.k = n.op == BinOp::And || n.op == BinOp::Or ? NK::AndOr : NK::Binary;
        kids();
        break;
      case ExprKind::Unary:
        n.k = NK::Unary;
        n.flag = e.text == "not";
        kids();
        break;
      case ExprKind::List: n.k = NK::List; kids(); break;
      case ExprKind::Tuple: n.k = NK::Tuple; kids(); break;
      case ExprKind::Cons: n.k = NK::Cons; kids(); break;
      case ExprKind::Spawn:
        n.k = NK::Spawn;
        n.name = e.text;
        kids();
        break;
      case ExprKind::Send: n.k = NK::Send; kids(); break;
      case ExprKind::Await: n.k = NK::Await; kids(); break;
      case ExprKind::Reply: n.k = NK::Reply; kids(); break;
      case ExprKind::Receive:
        n.k = NK::Receive;
        n.sym = intern(e.text);
        for (const auto& a : e.arms) n.arms.emplace_back(compilePat(a.pattern), compile(*a.body));
        break;
      case ExprKind::Loop: n.k = NK::Loop; kids(); break;
      case ExprKind::Break: n.k = NK::Break; break;
      case ExprKind::Seq: n.k = NK::Seq; kids(); break;
      case ExprKind::Print:
        n.k = NK::Print;
        n.flag = e.printsString;
        kids();
        break;
    }
    return &n;
  }

  // ---- values --------------------------------------------------------------

  static EnvPtr bind(EnvPtr env, int sym, Value v) {
    return std::make_shared<const EnvCell>(EnvCell{sym, std::move(v), std::move(env)});
  }

  static const Value& lookup(const EnvPtr& env, int sym, const std::string& name) {
    for (const EnvCell* c = env.get(); c; c = c->next.get()) {
      if (c->sym == sym) return c->value;
    }
    stuck("unbound variable " + name);
  }

  bool match(const Pat& p, const Value& v, EnvPtr& env) const {
    switch (p.kind) {
      case Pattern::Kind::Wildcard: return true;
      case Pattern::Kind::Var: env = bind(std::move(env), p.sym, v); return true;
      case Pattern::Kind::Int:
      case Pattern::Kind::Float:
      case Pattern::Kind::Bool:
      case Pattern::Kind::String: return p.lit == v;
      case Pattern::Kind::Unit: return true;
      case Pattern::Kind::Ctor: {
        if (v.kind != VKind::Ctor || v.i != p.tag) return false;
        const auto& fields = v.items();
        if (fields.size() != p.args.size()) stuck("constructor arity mismatch");
        for (std::size_t k = 0; k < fields.size(); ++k) {
          if (!match(*p.args[k], fields[k], env)) return false;
        }
        return true;
      }
      case Pattern::Kind::Tuple: {
        const auto& items = v.items();
        if (v.kind != VKind::Tuple || items.size() != p.args.size()) stuck("tuple shape mismatch");
        for (std::size_t k = 0; k < items.size(); ++k) {
          if (!match(*p.args[k], items[k], env)) return false;
        }
        return true;
      }
      case Pattern::Kind::Nil: return v.isNil();
      case Pattern::Kind::Cons:
        if (v.isNil()) return false;
        return match(*p.args[0], v.head(), env) && match(*p.args[1], v.tail(), env);
    }
    return false;
  }

  std::string render(const Value& v) const {
    Renderer r([](const void* ctx, int tag) {
      const auto* self = static_cast<const Impl*>(ctx);
      return self->reprs.atom(self->ctorNames[static_cast<std::size_t>(tag)]);
    }, this);
    return r.render(v);
  }

  std::string pidText(std::int64_t pid) const { return fmt::format("<0.{}.0>", pid); }

  bool conforms(const Value& v, const types::Type& t) const {
    using types::Kind;
    switch (t.kind) {
      case Kind::Int: return v.kind == VKind::Int;
      case Kind::Float: return v.kind == VKind::Float;
      case Kind::Bool: return v.kind == VKind::Bool;
      case Kind::String: return v.kind == VKind::String;
      case Kind::Unit: return v.kind == VKind::Unit;
      case Kind::Pid:
      case Kind::PidAny: return v.kind == VKind::Pid;
      case Kind::Future: return v.kind == VKind::Future;
      case Kind::Fn: return v.kind == VKind::Closure;
      case Kind::Tuple: {
        if (v.kind != VKind::Tuple || v.items().size() != t.args.size()) return false;
        for (std::size_t k = 0; k < t.args.size(); ++k) {
          if (!conforms(v.items()[k], t.args[k])) return false;
        }
        return true;
      }
      case Kind::List: {
        if (v.kind != VKind::List) return false;
        for (const Value* x = &v; !x->isNil(); x = &x->tail()) {
          if (!conforms(x->head(), t.args[0])) return false;
        }
        return true;
      }
      case Kind::Named: {
        if (v.kind != VKind::Ctor) return false;
        const auto& ci = typed.env.ctors.at(ctorNames[static_cast<std::size_t>(v.i)]);
        return ci.adt == t.name;
      }
      default: return true;
    }
  }

  // ---- processes -----------------------------------------------------------

  void record(const std::string& kind, std::int64_t pid, std::string detail) {
    if (options.recordTrace) trace.push_back(Event{tick, kind, pid, std::move(detail)});
  }

  Process* proc(std::int64_t pid) {
    if (pid <= 0 || pid >= static_cast<std::int64_t>(procs.size())) return nullptr;
    return procs[static_cast<std::size_t>(pid)].get();
  }
  const Process* proc(std::int64_t pid) const {
    if (pid <= 0 || pid >= static_cast<std::int64_t>(procs.size())) return nullptr;
    return procs[static_cast<std::size_t>(pid)].get();
  }

  Process& newProcess(const std::string& name, std::optional<std::int64_t> parent) {
    auto p = std::make_unique<Process>();
    p->pid = static_cast<std::int64_t>(procs.size());
    p->name = name;
    p->parent = parent;
    procs.push_back(std::move(p));
    Process& ref = *procs.back();
    record("spawn", ref.pid, parent ? fmt::format("{} (supervised by {})", name, pidText(*parent)) : name);
    return ref;
  }

  std::int64_t spawnNamed(const std::string& name, std::optional<std::int64_t> parent) {
    if (auto it = table.supervisors.find(name); it != table.supervisors.end()) {
      Process& p = newProcess(name, parent);
      p.status = PStatus::Idle;
      p.sup = std::make_unique<SupState>();
      p.sup->spec = &it->second;
      std::int64_t pid = p.pid;
      for (std::size_t k = 0; k < it->second.children.size(); ++k) {
        std::int64_t child = spawnNamed(it->second.children[k].actor, pid);
        proc(pid)->sup->kids.push_back(child);
      }
      return pid;
    }
    auto body = actorBodies.find(name);
    if (body == actorBodies.end()) stuck("spawn of unknown actor " + name);
    Process& p = newProcess(name, parent);
    p.info = &table.actors.at(name);
    p.node = body->second;
    p.env = bind(nullptr, actorSelf.at(name), Value::pid(p.pid));
    return p.pid;
  }

  void deliver(std::int64_t from, std::int64_t to, bool response, std::int64_t ref, Value v) {
    Process* target = proc(to);
    if (!target || target->status == PStatus::Exited) {
      if (options.recordTrace) record("drop", from, fmt::format("to {} ref {}: {}", pidText(to), ref, render(v)));
      return;
    }
    if (!response && target->info) {
      const auto& adt = target->info->messageType.name;
      if (v.kind != VKind::Ctor || typed.env.ctors.at(ctorNames[static_cast<std::size_t>(v.i)]).adt != adt) {
        throw InternalError(fmt::format("message type safety violated: {} sent to {} which accepts {}", render(v),
                                        target->name, adt));
      }
    }
    ++messages;
    if (options.recordTrace) {
      record("deliver", to,
             fmt::format("{} from {} ref {}: {}", response ? "reply" : "request", pidText(from), ref, render(v)));
    }
    target->mailbox.push_back(Message{response, from, ref, std::move(v)});
    if (target->status == PStatus::BlockedReceive && !response) target->status = PStatus::Runnable;
    if (target->status == PStatus::BlockedAwait && response && ref == target->awaitRef) {
      target->status = PStatus::Runnable;
    }
  }

  void exitProcess(Process& p, bool crashed, const std::string& reason, bool notify = true, bool deadlock = false) {
    if (p.status == PStatus::Exited) return;
    p.status = PStatus::Exited;
    p.crashed = crashed;
    p.deadlockFault = deadlock;
    p.reason = reason;
    p.stack.clear();
    p.mailbox.clear();
    p.env.reset();
    if (p.sup) {
      for (auto kid = p.sup->kids.rbegin(); kid != p.sup->kids.rend(); ++kid) {
        if (Process* c = proc(*kid)) exitProcess(*c, false, "shutdown", false);
      }
    }
    record(crashed ? "crash" : "exit", p.pid, reason);
    if (notify && p.parent) {
      Process* sup = proc(*p.parent);
      if (sup && sup->status != PStatus::Exited) {
        sup->sup->notices.push_back(Notice{p.pid, crashed});
        sup->status = PStatus::Runnable;
      }
    }
    for (auto& q : procs) {
      if (q && q->status == PStatus::BlockedAwait && q->awaitTarget == p.pid) q->status = PStatus::Runnable;
    }
  }

  // ---- supervision ----------------------------------------------------------

  void supervise(Process& s) {
    SupState& st = *s.sup;
    while (!st.notices.empty() && s.status != PStatus::Exited) {
      Notice n = st.notices.front();
      st.notices.pop_front();
      auto it = std::find(st.kids.begin(), st.kids.end(), n.child);
      if (it == st.kids.end()) continue;
      std::size_t failed = static_cast<std::size_t>(it - st.kids.begin());
      const auto& specs = st.spec->children;
      if (!actors::restartsAfter(specs[failed].policy, n.abnormal)) continue;
      st.restarts.push_back(tick);
      while (!st.restarts.empty() && st.restarts.front() + static_cast<std::uint64_t>(st.spec->window) <= tick) {
        st.restarts.pop_front();
      }
      if (static_cast<int>(st.restarts.size()) > st.spec->maxRestarts) {
        exitProcess(s, true, "shutdown: reached max restart intensity");
        return;
      }
      auto set = actors::restartSet(st.spec->strategy, st.kids.size(), failed);
      for (auto k = set.rbegin(); k != set.rend(); ++k) {
        if (*k == failed) continue;
        if (Process* c = proc(st.kids[*k])) exitProcess(*c, false, "shutdown", false);
      }
      for (std::size_t k : set) {
        if (k != failed && specs[k].policy == syntax::RestartPolicy::Temporary) continue;
        std::int64_t old = st.kids[k];
        std::int64_t fresh = spawnNamed(specs[k].actor, s.pid);
        proc(s.pid)->sup->kids[k] = fresh;
        record("restart", s.pid, fmt::format("{}: {} -> {}", specs[k].id, pidText(old), pidText(fresh)));
      }
    }
    if (s.status != PStatus::Exited) s.status = PStatus::Idle;
  }

  // ---- evaluation -------------------------------------------------------------

  void eval(Process& p) {
    const Node& n = *p.node;
    auto push = [&](FK k) {
      p.stack.push_back(Frame{k, &n, p.env, 0, {}});
      p.node = n.kids[0];
    };
    switch (n.k) {
      case NK::Lit: p.value = n.lit; p.mode = Mode::Return; return;
      case NK::Local: p.value = lookup(p.env, n.sym, n.name); p.mode = Mode::Return; return;
      case NK::Global:
        p.value = Value{};
        p.value.kind = VKind::Closure;
        p.value.i = n.index;
        p.mode = Mode::Return;
        return;
      case NK::Lambda:
        p.value = Value{};
        p.value.kind = VKind::Closure;
        p.value.i = -1;
        p.value.ptr = std::make_shared<const ClosureData>(ClosureData{&n, p.env});
        p.mode = Mode::Return;
        return;
      case NK::Let: push(FK::Let); return;
      case NK::LetPat: push(FK::LetPat); return;
      case NK::If: push(FK::If); return;
      case NK::Case: push(FK::Case); return;
      case NK::AndOr: push(FK::AndOr); return;
      case NK::Seq: push(FK::Seq); return;
      case NK::Loop: push(FK::Loop); return;
      case NK::Break:
        while (!p.stack.empty() && p.stack.back().k != FK::Loop) p.stack.pop_back();
        if (p.stack.empty()) stuck("break outside loop");
        p.stack.pop_back();
        p.value = Value::unit();
        p.mode = Mode::Return;
        return;
      case NK::Receive: p.mode = Mode::Receive; return;
      default:
        if (n.kids.empty()) {
          apply(p, n, {}, p.env);
        } else {
          p.stack.push_back(Frame{FK::Args, &n, p.env, 0, {}});
          p.stack.back().vals.reserve(n.kids.size());
          p.node = n.kids[0];
        }
        return;
    }
  }

  void evalNext(Process& p, const Node* node, EnvPtr env) {
    p.node = node;
    p.env = std::move(env);
    p.mode = Mode::Eval;
  }

  void ret(Process& p) {
    if (p.stack.empty()) {
      exitProcess(p, false, p.pid == root ? "normal: " + render(p.value) : "normal");
      return;
    }
    Frame& f = p.stack.back();
    const Node& n = *f.node;
    switch (f.k) {
      case FK::Args:
        f.vals.push_back(std::move(p.value));
        if (++f.index < n.kids.size()) {
          evalNext(p, n.kids[f.index], f.env);
        } else {
          Frame done = std::move(f);
          p.stack.pop_back();
          apply(p, n, std::move(done.vals), std::move(done.env));
        }
        return;
      case FK::Let: {
        EnvPtr env = n.sym >= 0 ? bind(std::move(f.env), n.sym, std::move(p.value)) : std::move(f.env);
        p.stack.pop_back();
        evalNext(p, n.kids[1], std::move(env));
        return;
      }
      case FK::LetPat: {
        EnvPtr env = std::move(f.env);
        p.stack.pop_back();
        if (!match(*n.pat, p.value, env)) stuck("refutable let pattern failed");
        evalNext(p, n.kids[1], std::move(env));
        return;
      }
      case FK::If: {
        EnvPtr env = std::move(f.env);
        p.stack.pop_back();
        evalNext(p, p.value.i ? n.kids[1] : n.kids[2], std::move(env));
        return;
      }
      case FK::Case: {
        EnvPtr base = std::move(f.env);
        p.stack.pop_back();
        for (const auto& [pat, body] : n.arms) {
          EnvPtr env = base;
          if (match(*pat, p.value, env)) {
            evalNext(p, body, std::move(env));
            return;
          }
        }
        stuck("no case arm matched " + render(p.value));
      }
      case FK::AndOr: {
        EnvPtr env = std::move(f.env);
        p.stack.pop_back();
        bool left = p.value.i != 0;
        if ((n.op == BinOp::And && !left) || (n.op == BinOp::Or && left)) return;  // value stays
        evalNext(p, n.kids[1], std::move(env));
        return;
      }
      case FK::Seq:
        if (++f.index + 1 == n.kids.size()) {
          EnvPtr env = std::move(f.env);
          p.stack.pop_back();
          evalNext(p, n.kids.back(), std::move(env));
        } else {
          evalNext(p, n.kids[f.index], f.env);
        }
        return;
      case FK::Loop: evalNext(p, n.kids[0], f.env); return;
    }
  }

  static Value checked(bool overflow, const std::int64_t& v) {
    if (overflow) throw Fault{"badarith: integer overflow"};
    return Value::integer(v);
  }

  Value arith(BinOp op, const Value& a, const Value& b) {
    if (a.kind == VKind::Float) {
      double x = a.f, y = b.f;
      switch (op) {
        case BinOp::Add: return Value::floating(x + y);
        case BinOp::Sub: return Value::floating(x - y);
        case BinOp::Mul: return Value::floating(x * y);
        case BinOp::Div:
          if (y == 0) throw Fault{"badarith: division by zero"};
          return Value::floating(x / y);
        default: break;
      }
    }
    std::int64_t x = a.i, y = b.i, r = 0;
    switch (op) {
      case BinOp::Add: {
        bool o = __builtin_add_overflow(x, y, &r);
        return checked(o, r);
      }
      case BinOp::Sub: {
        bool o = __builtin_sub_overflow(x, y, &r);
        return checked(o, r);
      }
      case BinOp::Mul: {
        bool o = __builtin_mul_overflow(x, y, &r);
        return checked(o, r);
      }
      case BinOp::Div:
        if (y == 0) throw Fault{"badarith: division by zero"};
        return Value::integer(x / y);
      case BinOp::Rem:
        if (y == 0) throw Fault{"badarith: division by zero"};
        return Value::integer(x % y);
      default: break;
    }
    stuck("bad arithmetic operator");
  }

  void apply(Process& p, const Node& n, std::vector<Value> vals, EnvPtr env) {
    auto give = [&](Value v) {
      p.value = std::move(v);
      p.mode = Mode::Return;
    };
    switch (n.k) {
      case NK::Ctor: give(Value::ctor(n.index, std::move(vals))); return;
      case NK::Tuple: give(Value::tuple(std::move(vals))); return;
      case NK::List: give(Value::list(vals)); return;
      case NK::Cons: give(Value::cons(std::move(vals[0]), std::move(vals[1]))); return;
      case NK::Unary:
        if (n.flag) {
          give(Value::boolean(vals[0].i == 0));
        } else if (vals[0].kind == VKind::Float) {
          give(Value::floating(-vals[0].f));
        } else {
          give(arith(BinOp::Sub, Value::integer(0), vals[0]));
        }
        return;
      case NK::Binary:
        switch (n.op) {
          case BinOp::Eq: give(Value::boolean(vals[0] == vals[1])); return;
          case BinOp::Ne: give(Value::boolean(vals[0] != vals[1])); return;
          case BinOp::Lt: give(Value::boolean(compareNumbers(vals[0], vals[1]) < 0)); return;
          case BinOp::Le: give(Value::boolean(compareNumbers(vals[0], vals[1]) <= 0)); return;
          case BinOp::Gt: give(Value::boolean(compareNumbers(vals[0], vals[1]) > 0)); return;
          case BinOp::Ge: give(Value::boolean(compareNumbers(vals[0], vals[1]) >= 0)); return;
          default: give(arith(n.op, vals[0], vals[1])); return;
        }
      case NK::Print: {
        const Value& v = vals[0];
        output += (n.flag && v.kind == VKind::String) ? v.str() : render(v);
        output += '\n';
        give(Value::unit());
        return;
      }
      case NK::Call: call(p, vals); return;
      case NK::Spawn: give(Value::pid(spawnNamed(n.name, std::nullopt))); return;
      case NK::Send: {
        if (vals[0].kind != VKind::Pid) stuck("send to a non-pid");
        std::int64_t ref = ++refs;
        if (options.recordTrace) record("send", p.pid, fmt::format("to {} ref {}: {}", pidText(vals[0].i), ref, render(vals[1])));
        deliver(p.pid, vals[0].i, false, ref, vals[1]);
        give(Value::future(vals[0].i, ref));
        return;
      }
      case NK::Await:
        if (vals[0].kind != VKind::Future) stuck("await on a non-future");
        p.awaitTarget = vals[0].i;
        p.awaitRef = vals[0].j;
        p.mode = Mode::Await;
        return;
      case NK::Reply: {
        const Value& ctx = lookup(env, replySym, "reply context");
        if (p.info && !conforms(vals[0], p.info->uniformReply)) {
          throw InternalError(fmt::format("reply type safety violated: {} replied {}, expected {}", p.name,
                                          render(vals[0]), types::typeString(p.info->uniformReply)));
        }
        std::int64_t caller = ctx.items()[0].i;
        std::int64_t ref = ctx.items()[1].i;
        if (options.recordTrace) record("reply", p.pid, fmt::format("to {} ref {}: {}", pidText(caller), ref, render(vals[0])));
        deliver(p.pid, caller, true, ref, vals[0]);
        give(Value::unit());
        return;
      }
      default: stuck("bad application");
    }
  }

  void call(Process& p, std::vector<Value>& vals) {
    const Value& callee = vals[0];
    if (callee.kind != VKind::Closure) stuck("call of a non-function");
    if (callee.ptr) {
      const auto* cd = static_cast<const ClosureData*>(callee.ptr.get());
      const Node& lam = *cd->lambda;
      if (lam.params.size() + 1 != vals.size()) stuck("closure arity mismatch");
      EnvPtr env = cd->env;
      for (std::size_t k = 0; k < lam.params.size(); ++k) env = bind(std::move(env), lam.params[k], vals[k + 1]);
      evalNext(p, lam.kids[0], std::move(env));
      return;
    }
    const Global& g = globals[static_cast<std::size_t>(callee.i)];
    if (static_cast<int>(vals.size()) - 1 != g.arity) stuck("arity mismatch calling " + g.name);
    switch (g.kind) {
      case GlobalKind::User: {
        EnvPtr env;
        for (std::size_t k = 0; k < g.params.size(); ++k) env = bind(std::move(env), g.params[k], vals[k + 1]);
        evalNext(p, g.body, std::move(env));
        return;
      }
      case GlobalKind::Crash: throw Fault{vals[1].kind == VKind::String ? vals[1].str() : render(vals[1])};
      case GlobalKind::External:
        p.value = external(g, std::vector<Value>(vals.begin() + 1, vals.end()));
        p.mode = Mode::Return;
        return;
    }
  }

  Value external(const Global& g, const std::vector<Value>& args) {
    const std::string& m = g.mfa;
    auto str = [&](std::size_t k) -> const std::string& {
      if (args[k].kind != VKind::String) throw Fault{"badarg in " + m};
      return args[k].str();
    };
    if (m == "io:format/1") {
      output += str(0);
      return Value::unit();
    }
    if (m == "erlang:integer_to_list/1") return Value::string(std::to_string(args[0].i));
    if (m == "erlang:float_to_list/1") return Value::string(Renderer::formatFloat(args[0].f));
    if (m == "erlang:list_to_integer/1") {
      try {
        std::size_t used = 0;
        long long v = std::stoll(str(0), &used);
        if (used != str(0).size()) throw Fault{"badarg in " + m};
        return Value::integer(v);
      } catch (const std::logic_error&) {
        throw Fault{"badarg in " + m};
      }
    }
    if (m == "erlang:abs/1") {
      return args[0].kind == VKind::Float ? Value::floating(std::abs(args[0].f)) : Value::integer(std::abs(args[0].i));
    }
    if (m == "erlang:float/1") return Value::floating(static_cast<double>(args[0].i));
    if (m == "erlang:round/1") return Value::integer(static_cast<std::int64_t>(std::llround(args[0].f)));
    if (m == "erlang:trunc/1") return Value::integer(static_cast<std::int64_t>(args[0].f));
    if (m == "erlang:length/1") {
      if (args[0].kind == VKind::String) return Value::integer(static_cast<std::int64_t>(args[0].str().size()));
      return Value::integer(static_cast<std::int64_t>(args[0].listItems().size()));
    }
    if (m == "erlang:max/2") return compareNumbers(args[0], args[1]) >= 0 ? args[0] : args[1];
    if (m == "erlang:min/2") return compareNumbers(args[0], args[1]) <= 0 ? args[0] : args[1];
    if (m == "lists:reverse/1") {
      auto items = args[0].listItems();
      std::reverse(items.begin(), items.end());
      return Value::list(items);
    }
    if (m == "string:concat/2" || m == "lists:append/2") {
      if (args[0].kind == VKind::String) return Value::string(str(0) + str(1));
      auto items = args[0].listItems();
      auto rest = args[1].listItems();
      items.insert(items.end(), rest.begin(), rest.end());
      return Value::list(items);
    }
    throw Fault{"undef: external " + m + " is not available in the interpreter"};
  }

  bool tryReceive(Process& p) {
    auto it = std::find_if(p.mailbox.begin(), p.mailbox.end(), [](const Message& m) { return !m.response; });
    if (it == p.mailbox.end()) {
      p.status = PStatus::BlockedReceive;
      return false;
    }
    Message msg = std::move(*it);
    p.mailbox.erase(it);
    const Node& n = *p.node;
    if (options.recordTrace) record("receive", p.pid, fmt::format("from {} ref {}: {}", pidText(msg.sender), msg.ref, render(msg.value)));
    EnvPtr base = bind(p.env, n.sym, msg.value);
    base = bind(std::move(base), replySym,
                Value::tuple({Value::pid(msg.sender), Value::integer(msg.ref)}));
    for (const auto& [pat, body] : n.arms) {
      EnvPtr env = base;
      if (match(*pat, msg.value, env)) {
        evalNext(p, body, std::move(env));
        return true;
      }
    }
    stuck("no receive arm matched " + render(msg.value));
  }

  bool tryAwait(Process& p) {
    auto it = std::find_if(p.mailbox.begin(), p.mailbox.end(),
                           [&](const Message& m) { return m.response && m.ref == p.awaitRef; });
    if (it != p.mailbox.end()) {
      p.value = std::move(it->value);
      p.mailbox.erase(it);
      if (options.recordTrace) record("await", p.pid, fmt::format("ref {} from {}", p.awaitRef, pidText(p.awaitTarget)));
      p.mode = Mode::Return;
      p.status = PStatus::Runnable;
      return true;
    }
    const Process* target = proc(p.awaitTarget);
    if (!target || target->status == PStatus::Exited) {
      throw Fault{fmt::format("DeadlockFault: await on ref {} but {} ({}) exited without replying", p.awaitRef,
                              pidText(p.awaitTarget), target ? target->name : "?"),
                  true};
    }
    p.status = PStatus::BlockedAwait;
    return false;
  }

  bool step(Process& p) {
    ++steps;
    try {
      switch (p.mode) {
        case Mode::Eval: eval(p); break;
        case Mode::Return: ret(p); break;
        case Mode::Receive: return tryReceive(p);
        case Mode::Await: return tryAwait(p);
      }
    } catch (const Fault& f) {
      exitProcess(p, true, f.reason, true, f.deadlock);
      return false;
    }
    return p.status == PStatus::Runnable;
  }

  // ---- scheduling ---------------------------------------------------------------

  void runTurn(Process& p) {
    if (p.sup) {
      supervise(p);
      return;
    }
    for (int b = 0; b < options.budget; ++b) {
      if (!step(p)) break;
    }
  }

  void runUntilQuiescent() {
    std::vector<std::int64_t> order;
    while (!stepLimit) {
      order.clear();
      for (const auto& p : procs) {
        if (p && p->status == PStatus::Runnable) order.push_back(p->pid);
      }
      if (order.empty()) break;
      std::shuffle(order.begin(), order.end(), rng);
      for (auto pid : order) {
        Process* p = proc(pid);
        if (p->status == PStatus::Runnable) runTurn(*p);
        if (steps > options.maxSteps) {
          stepLimit = true;
          break;
        }
      }
      ++tick;
    }
  }

  std::int64_t spawnRoot() {
    auto it = globalIndex.find(options.entry);
    if (it == globalIndex.end() || globals[static_cast<std::size_t>(it->second)].kind != GlobalKind::User) {
      throw InternalError("no entry function '" + options.entry + "'");
    }
    const Global& g = globals[static_cast<std::size_t>(it->second)];
    if (g.arity != 0) throw InternalError("entry function '" + options.entry + "' must take no arguments");
    Process& p = newProcess(options.entry, std::nullopt);
    p.node = g.body;
    root = p.pid;
    return root;
  }

  std::string describe(const Process& p) const {
    std::string what;
    switch (p.status) {
      case PStatus::BlockedAwait:
        what = fmt::format("awaiting ref {} from {}", p.awaitRef, pidText(p.awaitTarget));
        break;
      case PStatus::BlockedReceive: what = "waiting in receive"; break;
      case PStatus::Idle: what = "supervising"; break;
      default: what = "runnable"; break;
    }
    return fmt::format("{} {} {}", pidText(p.pid), p.name, what);
  }

  RunResult result() const {
    RunResult r;
    r.output = output;
    r.trace = trace;
    r.steps = steps;
    r.ticks = tick;
    r.messages = messages;
    const Process* rp = proc(root);
    if (!rp) return r;
    if (rp->status == PStatus::Exited) {
      if (!rp->crashed) {
        r.status = RunResult::Status::Normal;
        r.value = rp->value;
        r.valueText = render(rp->value);
      } else {
        r.status = rp->deadlockFault ? RunResult::Status::Deadlock : RunResult::Status::Crashed;
        r.error = rp->reason;
      }
      return r;
    }
    if (stepLimit) {
      r.status = RunResult::Status::StepLimit;
      r.error = fmt::format("step limit of {} exceeded", options.maxSteps);
      return r;
    }
    r.status = RunResult::Status::Deadlock;
    std::string blocked;
    for (const auto& p : procs) {
      if (p && p->status != PStatus::Exited && p->status != PStatus::Idle) {
        blocked += (blocked.empty() ? "" : "; ") + describe(*p);
      }
    }
    r.error = "DeadlockFault: no runnable process; blocked: " + blocked;
    return r;
  }
};

Machine::Machine(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                 const actors::ActorTable& table, RunOptions options)
    : impl_(std::make_unique<Impl>(program, typed, table, std::move(options))) {}

Machine::~Machine() = default;

RunResult Machine::run() {
  impl_->spawnRoot();
  impl_->runUntilQuiescent();
  return impl_->result();
}

std::int64_t Machine::spawnRoot() { return impl_->spawnRoot(); }
std::int64_t Machine::spawn(const std::string& name) { return impl_->spawnNamed(name, std::nullopt); }
void Machine::runUntilQuiescent() { impl_->runUntilQuiescent(); }

void Machine::crash(std::int64_t pid, const std::string& reason) {
  if (Process* p = impl_->proc(pid)) impl_->exitProcess(*p, true, reason);
}

void Machine::stop(std::int64_t pid) {
  if (Process* p = impl_->proc(pid)) impl_->exitProcess(*p, false, "normal");
}

bool Machine::alive(std::int64_t pid) const {
  const Process* p = impl_->proc(pid);
  return p && p->status != PStatus::Exited;
}

std::vector<std::int64_t> Machine::children(std::int64_t supervisor) const {
  const Process* p = impl_->proc(supervisor);
  if (!p || !p->sup) return {};
  return p->sup->kids;
}

RunResult Machine::result() const { return impl_->result(); }
std::uint64_t Machine::tick() const { return impl_->tick; }
std::string Machine::render(const Value& v) const { return impl_->render(v); }

RunResult evalProgram(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                      const actors::ActorTable& table, RunOptions options) {
  Machine m(program, typed, table, std::move(options));
  return m.run();
}

syntax::SourceProgram anfLowered(const syntax::SourceProgram& program) {
  syntax::SourceProgram out;
  out.imports = program.imports;
  for (const auto& d : program.decls) {
    syntax::Decl copy{syntax::TypeDecl{}, d.span, d.module};
    if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
      copy.node = syntax::FnDecl{f->name, f->params, f->result, anf::lowerToExpr(*anf::markGuards(anf::toAnf(*f->body)))};
    } else if (const auto* a = std::get_if<syntax::ActorDecl>(&d.node)) {
      copy.node =
          syntax::ActorDecl{a->name, a->selfName, a->result, anf::lowerToExpr(*anf::markGuards(anf::toAnf(*a->runBody)))};
    } else if (const auto* s = std::get_if<syntax::SupervisorDecl>(&d.node)) {
      syntax::SupervisorDecl sd{s->name, s->strategy, {}, s->restartLimit};
      for (const auto& c : s->children) {
        syntax::ChildSpecDecl cs{c.id, c.actor, {}, c.policy, c.span};
        for (const auto& arg : c.args) cs.args.push_back(syntax::clone(*arg));
        sd.children.push_back(std::move(cs));
      }
      copy.node = std::move(sd);
    } else if (const auto* t = std::get_if<syntax::TypeDecl>(&d.node)) {
      copy.node = *t;
    } else if (const auto* e = std::get_if<syntax::ExternalDecl>(&d.node)) {
      copy.node = *e;
    }
    out.decls.push_back(std::move(copy));
  }
  return out;
}

}  // namespace nvlang::rt
