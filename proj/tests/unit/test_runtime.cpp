#include <doctest.h>

#include <set>

#include "nvlang/runtime.hpp"
#include "support/corpus.hpp"
#include "support/pipeline.hpp"
#include "support/progen.hpp"
#include "support/supervision.hpp"

using namespace nvlang;
using nvlang::rt::RunResult;
using Status = RunResult::Status;
using nvtest::Fate;
using nvtest::kCounter;
using nvtest::supervised;

namespace {

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST_CASE("corpus listings produce their recorded output") {
  for (const auto& path : nvtest::corpusFiles("listings")) {
    std::string src = nvtest::readFile(path);
    CAPTURE(path.filename().string());
    auto c = nvtest::check(src);
    RunResult r = nvtest::run(*c);
    CHECK(r.status == Status::Normal);
    CHECK(r.output == joined(nvtest::header(src, "stdout")));
    for (const auto& code : nvtest::header(src, "exit")) CHECK(code == "0");
  }
}

TEST_CASE("values print as the compiled terms would") {
  auto r = nvtest::run(R"(type Option[T] =
  | Some(value: T)
  | None

fn main() ->
  print(Some(3))
  print(None)
  print([1, 2])
  print("hi")
  print(["a"])
  print((1, "x"))
  print(())
  print([104, 105])
  print([])
  print(0.1 + 0.2)
  print(true)
  0
)");
  REQUIRE(r.status == Status::Normal);
  CHECK(r.output == "{some,3}\nnone\n[1,2]\nhi\n[\"a\"]\n{1,\"x\"}\nok\n\"hi\"\n[]\n0.30000000000000004\ntrue\n");
}

TEST_CASE("integer division truncates and remainder follows the dividend") {
  auto r = nvtest::run("fn main() ->\n  print(-7 / 2)\n  print(-7 % 2)\n  print(7 % -2)\n  print(7.0 / 2.0)\n  0\n");
  REQUIRE(r.status == Status::Normal);
  CHECK(r.output == "-3\n-1\n1\n3.5\n");
}

TEST_CASE("faults crash the process") {
  auto r = nvtest::run("fn main() ->\n  let z = 0\n  10 / z\n");
  CHECK(r.status == Status::Crashed);
  CHECK(r.error.find("badarith") != std::string::npos);

  r = nvtest::run("fn main() ->\n  print(1)\n  crash(\"gave up\")\n");
  CHECK(r.status == Status::Crashed);
  CHECK(r.error == "gave up");
  CHECK(r.output == "1\n");
}

TEST_CASE("tail calls run in constant stack and deep recursion is fine") {
  auto r = nvtest::run(R"(fn count(n, acc) ->
  if n == 0 then acc else count(n - 1, acc + 1)

fn build(n) ->
  if n == 0 then [] else n :: build(n - 1)

fn sum(xs) ->
  case xs
    [] -> 0
    h :: t -> h + sum(t)

fn main() ->
  print(count(1000000, 0))
  sum(build(200000))
)");
  REQUIRE(r.status == Status::Normal);
  CHECK(r.output == "1000000\n");
  CHECK(r.valueText == "20000100000");
}

TEST_CASE("closures capture their environment") {
  auto r = nvtest::run(R"(fn adder(n) ->
  fn(x) -> x + n

fn twice(f, x) ->
  f(f(x))

fn main() ->
  let add3 = adder(3)
  twice(add3, 4)
)");
  CHECK(r.valueText == "10");
}

TEST_CASE("awaiting a message that never gets a reply is a deadlock") {
  auto r = nvtest::run(std::string(kCounter) + "\nfn main() ->\n  let c = spawn Counter()\n  c.send Stop |> await\n");
  CHECK(r.status == Status::Deadlock);
  CHECK(r.error.find("DeadlockFault") != std::string::npos);
  CHECK(r.error.find("<0.2.0>") != std::string::npos);

  // The responder stays alive, so the root blocks forever.
  r = nvtest::run(std::string(kCounter) +
                  "\nfn main() ->\n  let c = spawn Counter()\n  let f = c.send Get\n  let a = f |> await\n"
                  "  let b = f |> await\n  a + b\n");
  CHECK(r.status == Status::Deadlock);
  CHECK(r.error.find("<0.1.0> main awaiting") != std::string::npos);

  r = nvtest::run(std::string(kCounter) + "\nfn main() ->\n  let c = spawn Counter()\n  c.send Boom |> await\n");
  CHECK(r.status == Status::Deadlock);
}

TEST_CASE("messages to exited actors are dropped") {
  auto r = nvtest::run(std::string(kCounter) +
                       "\nfn main() ->\n  let c = spawn Counter()\n  c.send Stop\n  c.send Stop\n  c.send Increment\n"
                       "  print(7)\n  0\n");
  CHECK(r.status == Status::Normal);
  CHECK(r.output == "7\n");
}

TEST_CASE("scheduling is a function of the seed") {
  auto c = nvtest::check(std::string(kCounter) + R"(
fn main() ->
  let a = spawn Counter()
  let b = spawn Counter()
  let d = spawn Counter()
  let fa = a.send Increment
  let fb = b.send Increment
  let fd = d.send Get
  print((fa |> await) + (fb |> await) + (fd |> await))
  0
)");
  rt::RunOptions a;
  a.seed = 7;
  auto r1 = nvtest::run(*c, a);
  auto r2 = nvtest::run(*c, a);
  CHECK(rt::traceJsonl(r1.trace) == rt::traceJsonl(r2.trace));
  CHECK(r1.steps == r2.steps);
  std::set<std::string> traces;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    rt::RunOptions o;
    o.seed = seed;
    auto r = nvtest::run(*c, o);
    CHECK(r.output == r1.output);
    traces.insert(rt::traceJsonl(r.trace));
  }
  CHECK(traces.size() > 1);
}

TEST_CASE("trace lines are JSON objects") {
  auto r = nvtest::run(nvtest::readFile(nvtest::corpusDir() / "listings" / "counter.nv"));
  std::string jsonl = rt::traceJsonl(r.trace);
  CHECK(jsonl.rfind("{\"tick\":0,\"kind\":\"spawn\",\"pid\":1,\"detail\":\"main\"}\n", 0) == 0);
  std::set<std::string> kinds;
  for (const auto& e : r.trace) kinds.insert(e.kind);
  for (const char* k : {"spawn", "send", "deliver", "receive", "reply", "await", "exit"}) CHECK(kinds.count(k) == 1);
}

TEST_CASE("ANF lowering preserves behaviour") {
  nvtest::ProgramGen gen(2024);
  for (int i = 0; i < 300; ++i) {
    std::string src = gen.program(5, 3);
    CAPTURE(src);
    auto c = nvtest::check(src);
    auto direct = nvtest::run(*c);
    auto lowered = nvtest::runLowered(*c);
    REQUIRE(direct.status == lowered.status);
    CHECK(direct.output == lowered.output);
    CHECK(direct.valueText == lowered.valueText);
  }
  for (const auto& path : nvtest::corpusFiles("listings")) {
    CAPTURE(path.filename().string());
    auto c = nvtest::check(nvtest::readFile(path));
    auto direct = nvtest::run(*c);
    auto lowered = nvtest::runLowered(*c);
    CHECK(direct.status == lowered.status);
    CHECK(direct.output == lowered.output);
  }
}

namespace {

std::vector<Fate> observe(const char* strategy, const std::vector<std::string>& policies, std::size_t failed,
                          bool abnormal) {
  auto o = nvtest::observe(strategy, policies, failed, abnormal);
  CHECK(o.consistent);
  CHECK(o.supervisorAlive);
  return o.fates;
}

}  // namespace

TEST_CASE("supervision matrix") {
  int cases = 0;
  for (const char* strategy : {"one_for_one", "one_for_all", "rest_for_one"}) {
    for (const char* policy : {"permanent", "transient", "temporary"}) {
      for (std::size_t failed = 0; failed < 3; ++failed) {
        std::vector<std::string> policies(3, policy);
        CAPTURE(strategy);
        CAPTURE(policy);
        CAPTURE(failed);
        CHECK(observe(strategy, policies, failed, true) == nvtest::expectedFates(strategy, policies, failed, true));
        CHECK(observe(strategy, policies, failed, false) == nvtest::expectedFates(strategy, policies, failed, false));
        ++cases;
      }
    }
  }
  CHECK(cases == 27);

  std::vector<std::string> mixed{"permanent", "temporary", "transient"};
  for (const char* strategy : {"one_for_one", "one_for_all", "rest_for_one"}) {
    for (std::size_t failed = 0; failed < 3; ++failed) {
      for (bool abnormal : {true, false}) {
        CAPTURE(strategy);
        CAPTURE(failed);
        CAPTURE(abnormal);
        CHECK(observe(strategy, mixed, failed, abnormal) == nvtest::expectedFates(strategy, mixed, failed, abnormal));
      }
    }
  }
}

TEST_CASE("restart intensity escalates") {
  std::vector<std::string> four(4, "permanent");
  auto c = nvtest::check(supervised("one_for_one", four));
  {
    // Three restarts at once are within the default limit.
    rt::Machine m(c->program, c->typed, c->table);
    auto sup = m.spawn("S");
    m.runUntilQuiescent();
    auto kids = m.children(sup);
    for (int k = 0; k < 3; ++k) m.crash(kids[static_cast<std::size_t>(k)], "boom");
    m.runUntilQuiescent();
    CHECK(m.alive(sup));
  }
  rt::Machine m(c->program, c->typed, c->table);
  auto sup = m.spawn("S");
  m.runUntilQuiescent();
  auto kids = m.children(sup);
  for (auto k : kids) m.crash(k, "boom");
  m.runUntilQuiescent();
  CHECK_FALSE(m.alive(sup));
  for (auto k : m.children(sup)) CHECK_FALSE(m.alive(k));
  CHECK(m.result().trace.back().kind == "crash");

  // A wider limit tolerates the same burst.
  auto d = nvtest::check(supervised("one_for_one", {"permanent"}, "  restarts 10 within 5\n"));
  rt::Machine m2(d->program, d->typed, d->table);
  auto sup2 = m2.spawn("S");
  m2.runUntilQuiescent();
  for (int k = 0; k < 10; ++k) {
    m2.crash(m2.children(sup2)[0], "boom");
    m2.runUntilQuiescent();
  }
  CHECK(m2.alive(sup2));
}

TEST_CASE("a failing child supervisor is restarted by its parent") {
  std::string src = supervised("one_for_one", {"permanent"}, "  restarts 0 within 5\n");
  src.replace(src.find("\nfn main"), 0, "\nsupervisor Top\n  strategy one_for_one\n  children\n    inner: S()\n");
  auto c = nvtest::check(src);
  rt::Machine m(c->program, c->typed, c->table);
  auto top = m.spawn("Top");
  m.runUntilQuiescent();
  auto inner = m.children(top).at(0);
  auto worker = m.children(inner).at(0);
  m.crash(worker, "boom");
  m.runUntilQuiescent();
  CHECK_FALSE(m.alive(inner));
  CHECK(m.alive(top));
  auto fresh = m.children(top).at(0);
  CHECK(fresh != inner);
  CHECK(m.alive(fresh));
  CHECK(m.children(fresh).size() == 1);
  CHECK(m.alive(m.children(fresh)[0]));
}
