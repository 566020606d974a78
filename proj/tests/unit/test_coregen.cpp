#include <doctest.h>

#include <regex>

#include "nvlang/coregen.hpp"
#include "support/core_check.hpp"
#include "support/corpus.hpp"
#include "support/pipeline.hpp"
#include "support/progen.hpp"

using namespace nvlang;
using namespace nvlang::coregen;

namespace {

std::string emit(const std::string& src, CoreOptions options = {}) {
  auto c = nvtest::check(src);
  return emitModule(c->program, c->typed, c->table, options).text();
}

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

const char* kOption = "type Option[T] =\n  | Some(value: T)\n  | None\n\n";

}  // namespace

TEST_CASE("name mangling") {
  CHECK(mangleVar("x") == "X");
  CHECK(mangleVar("new_store") == "New_store");
  CHECK(mangleVar("_Anf3") == "_Anf3");

  FunctionNames names;
  CHECK(names.assign("find_key", 2) == "find_key");
  CHECK(names.assign("findKey", 2) == "findkey");
  CHECK(names.assign("FindKey", 2) == "findkey_2");
  CHECK(names.assign("findkey", 1) == "findkey");
  CHECK(names.assign("findKey", 2) == "findkey");

  std::string text = emit(nvtest::readFile(nvtest::corpusDir() / "listings" / "kv_store.nv"));
  CHECK(contains(text, "apply 'find_key'/2(Key, Store)"));
  CHECK(contains(text, "{'valuefound', V}"));
}

TEST_CASE("values follow the representation table") {
  std::string text = emit(std::string(kOption) +
                          "fn main() ->\n  let a = Some(42)\n  let b = None\n  let c = (1, 2)\n  let d = [1, 2]\n"
                          "  let e = \"hi\"\n  let f = ()\n  let g = 2.5\n  (a, b, c, d, e, f, g)\n");
  CHECK(contains(text, "let <A> = {'some', 42} in"));
  CHECK(contains(text, "let <B> = 'none' in"));
  CHECK(contains(text, "let <C> = {1, 2} in"));
  CHECK(contains(text, "let <D> = [1, 2] in"));
  CHECK(contains(text, "let <E> = [104,105] in"));
  CHECK(contains(text, "let <F> = 'ok' in"));
  CHECK(contains(text, "let <G> = 2.5 in"));
}

TEST_CASE("guards become when clauses") {
  std::string text = emit("fn check(x) ->\n  if x == 42 then \"match\" else \"no match\"\n");
  CHECK(contains(text, "case X of\n"
                       "          <_G> when call 'erlang':'=:='(_G, 42) ->\n"
                       "            [109,97,116,99,104]\n"
                       "          <_G2> when 'true' ->\n"));
  text = emit("fn check(b) ->\n  if b then 1 else 2\n");
  CHECK(contains(text, "case B of\n          <'true'> when 'true' ->"));
  CHECK(contains(text, "<'false'> when 'true' ->"));
}

TEST_CASE("operators map to erlang BIFs") {
  std::string text = emit("fn f(a, b) ->\n  (a / b, a % b, a != b, a <= b)\n\nfn g(x: Float, y: Float) -> Float\n  x / y + 0.5\n");
  CHECK(contains(text, "call 'erlang':'div'(A, B)"));
  CHECK(contains(text, "call 'erlang':'rem'(A, B)"));
  CHECK(contains(text, "call 'erlang':'=/='(A, B)"));
  CHECK(contains(text, "call 'erlang':'=<'(A, B)"));
  CHECK(contains(text, "call 'erlang':'/'(X, Y)"));
}

TEST_CASE("counter golden file") {
  CoreOptions o;
  o.defaultModule = "counter";
  std::string text = emit(nvtest::readFile(nvtest::corpusDir() / "listings" / "counter.nv"), o);
  CHECK(text == nvtest::readFile(std::filesystem::path(NVLANG_GOLDEN_DIR) / "counter.core"));

  // Four message arms; Stop returns without re-entering the loop.
  auto run = text.substr(text.find("'counter_run'/0 ="), text.find("'main'/0 =") - text.find("'counter_run'/0 ="));
  std::regex arm(R"(<('[a-z]+'|\{'[a-z]+', \w+\})> when 'true' ->)");
  CHECK(std::distance(std::sregex_iterator(run.begin(), run.end(), arm), std::sregex_iterator()) == 4);
  auto stop = run.substr(run.find("<'stop'>"));
  CHECK(stop.substr(0, stop.find("end")).find("apply") == std::string::npos);
  CHECK(contains(text, "call 'erlang':'spawn'('counter_run'/0)"));
}

TEST_CASE("actor protocol emission") {
  std::string text = emit(nvtest::readFile(nvtest::corpusDir() / "listings" / "kv_store.nv"));
  // Put replies Success, then continues with the new store.
  auto put = text.substr(text.find("<{'put', Key, Value}>"));
  put = put.substr(0, put.find("<{'delete'"));
  CHECK(std::regex_search(put, std::regex(R"(let <(_Anf\d+)> = 'success' in\s+do call 'erlang':'!'\(_@caller\d+, \{'response', _@ref\d+, \1\}\)\s+apply 'kv_loop'/1\(New_store\))")));

  text = emit(nvtest::readFile(nvtest::corpusDir() / "listings" / "workers.nv"));
  CHECK(std::regex_search(text, std::regex(R"(let <(_Anf\d+)> = \{'add', 10, 20\} in)")));
  CHECK(std::regex_search(text, std::regex(R"(do call 'erlang':'!'\(\w+, \{_@self\d+, _@ref\d+, _Anf\d+\}\))")));
  CHECK(std::regex_search(text, std::regex(R"(\{'future', \w+, _@ref\d+\})")));
  CHECK(std::regex_search(text, std::regex(R"(<\{'response', (_@r\d+), _@v\d+\}> when call 'erlang':'=:='\(\1, _@ref\d+\))")));
}

TEST_CASE("plain wire format behind a flag") {
  CoreOptions o;
  o.plainWireFormat = true;
  std::string text = emit(nvtest::readFile(nvtest::corpusDir() / "listings" / "counter.nv"), o);
  CHECK(std::regex_search(text, std::regex(R"(<\{(_@caller\d+), Msg\}> when call 'erlang':'is_pid'\(\1\))")));
  CHECK(std::regex_search(text, std::regex(R"(call 'erlang':'!'\(_@caller\d+, \{'response', 1\}\))")));
  CHECK(std::regex_search(text, std::regex(R"(<\{'response', _@v\d+\}> when 'true' ->)")));
  CHECK_FALSE(contains(text, "make_ref"));
  CHECK(nvtest::CoreCheck::check(text) == std::nullopt);
}

TEST_CASE("module wrapper") {
  auto c = nvtest::check(nvtest::readFile(nvtest::corpusDir() / "listings" / "type_inference.nv"));
  CoreOptions o;
  o.defaultModule = "listing1";
  CoreDoc doc = emitModule(c->program, c->typed, c->table, o);
  CHECK(doc.module == "listing1");
  CHECK(doc.exports == std::vector<std::pair<std::string, int>>{{"add", 2}, {"greet", 1}, {"main", 0}});
  for (const auto& [name, arity] : doc.exports) {
    auto key = repr::quoteAtom(name) + "/" + std::to_string(arity);
    CHECK(std::count_if(doc.definitions.begin(), doc.definitions.end(), [&](const auto& d) { return d.first == key; }) ==
          1);
  }

  std::string text = emit("external fn io_format(String) -> Unit = mfa \"io\" \"format\" 1\n\nfn main() ->\n"
                          "  io_format(\"hi\")\n");
  CHECK(contains(text, "call 'io':'format'([104,105])"));

  auto empty = nvtest::check(std::string(kOption));
  doc = emitModule(empty->program, empty->typed, empty->table, o);
  CHECK(doc.exports.empty());
  CHECK(doc.text() == "module 'listing1' []\n    attributes []\nend\n");
  CHECK(nvtest::CoreCheck::check(doc.text()) == std::nullopt);
}

TEST_CASE("supervisors compile to OTP callbacks") {
  std::string text = emit(nvtest::readFile(nvtest::corpusDir() / "listings" / "supervisor.nv"));
  CHECK(contains(text, "'init'/1 ="));
  CHECK(contains(text, "{'ok', {{'one_for_one', 3, 5},"));
  CHECK(contains(text, "{'worker2', {'main', 'worker_start_link', []}, 'permanent', 'brutal_kill', 'worker', ['main']}"));
  CHECK(contains(text, "call 'supervisor':'start_link'('main', 'mysupervisor')"));
  CHECK(contains(text, "call 'erlang':'spawn_link'('worker_run'/0)"));
}

TEST_CASE("emitted modules are well formed, deterministic and type-erased") {
  std::vector<std::string> sources;
  for (const auto& path : nvtest::corpusFiles("listings")) sources.push_back(nvtest::readFile(path));
  nvtest::ProgramGen gen(99);
  for (int i = 0; i < 100; ++i) sources.push_back(gen.program(5, 3));

  for (const auto& src : sources) {
    CAPTURE(src);
    auto c = nvtest::check(src);
    std::string text = emitModule(c->program, c->typed, c->table).text();
    CHECK(text == emitModule(c->program, c->typed, c->table).text());
    auto problem = nvtest::CoreCheck::check(text);
    CHECK_MESSAGE(!problem, *problem << "\n" << text);

    std::vector<std::string> typeNames{"Int", "Float", "Bool", "String", "Unit", "Pid", "PidOf", "Future", "List"};
    for (const auto& [name, _] : c->typed.env.adts) typeNames.push_back(name);
    for (const auto& t : typeNames) {
      CAPTURE(t);
      CHECK_FALSE(std::regex_search(text, std::regex("\\b" + t + "\\b")));
    }
  }
}

TEST_CASE("the checker rejects malformed Core") {
  CHECK(nvtest::CoreCheck::check("module 'm' ['f'/0]\n    attributes []\n'f'/0 =\n    fun () ->\n        X\nend\n"));
  CHECK(nvtest::CoreCheck::check("module 'm' ['g'/0]\n    attributes []\n'f'/0 =\n    fun () -> 'ok'\nend\n"));
  CHECK(nvtest::CoreCheck::check("module 'm' []\n    attributes []\n'f'/0 =\n    fun () -> apply 'h'/0()\nend\n"));
  CHECK(nvtest::CoreCheck::check("module 'm' []\n    attributes []\n'f'/1 =\n    fun (A) -> case A of end\nend\n"));
  CHECK_FALSE(nvtest::CoreCheck::check(
      "module 'm' ['f'/1]\n    attributes []\n'f'/1 =\n    fun (A) -> case A of <{B, _C}> when 'true' -> B end\nend\n"));
}

TEST_CASE("interpreter and generator share constructor atoms") {
  std::string src = "type Clash =\n  | Foo\n  | FOO\n  | Ok\n  | Case(n: Int)\n\nfn main() ->\n  print(Foo)\n  print(FOO)\n"
                    "  print(Ok)\n  print(Case(1))\n  [Foo, FOO, Ok, Case(1)]\n";
  auto c = nvtest::check(src);
  auto r = nvtest::run(*c);
  CHECK(r.output == "foo\nfoo_2\nok_2\n{'case',1}\n");
  std::string text = emitModule(c->program, c->typed, c->table).text();
  for (const char* atom : {"'foo'", "'foo_2'", "'ok_2'"}) {
    CHECK(std::regex_search(text, std::regex(std::string(R"(let <_Anf\d+> = )") + atom + " in")));
  }
  CHECK(contains(text, "{'case', 1}"));

  auto table = repr::ReprTable::build(c->typed.env);
  for (const auto& [ctor, atom] : table.atoms()) {
    CAPTURE(ctor);
    CHECK(contains(text, repr::quoteAtom(atom)));
  }
}
