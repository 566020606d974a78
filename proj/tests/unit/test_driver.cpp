#include <doctest.h>

#include "nvlang/driver.hpp"
#include "support/corpus.hpp"

using namespace nvlang;
namespace fs = std::filesystem;

TEST_CASE("diagnostic format") {
  driver::Diagnostic d{"a/b.nv", Span{0, 3, 7}, ErrorKind::TypeMismatch, "expected Int, found String"};
  CHECK(driver::format(d) == "a/b.nv:3:7: error: [TypeMismatch] expected Int, found String");
  d.file.clear();
  CHECK(driver::format(d).rfind("<input>:3:7:", 0) == 0);
}

TEST_CASE("check reports the offending file") {
  auto r = driver::checkFile(nvtest::corpusDir() / "reject" / "int_plus_string.nv");
  REQUIRE_FALSE(r.ok());
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].kind == ErrorKind::TypeMismatch);
  CHECK(fs::path(r.diagnostics[0].file).filename() == "int_plus_string.nv");
  CHECK(r.diagnostics[0].span.line == 4);

  r = driver::checkSource("main", "import lib\nfn main() ->\n  f(1)\n", {});
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostics[0].kind == ErrorKind::MissingModule);

  r = driver::checkSource("main", "fn main() ->\n  let = 1\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostics[0].kind == ErrorKind::Parse);
  CHECK(r.diagnostics[0].file == "main.nv");
}

TEST_CASE("errors in imported modules name that module's file") {
  fs::path dir = fs::temp_directory_path() / "nvlang-driver-test";
  fs::create_directories(dir);
  std::ofstream(dir / "broken.nv") << "fn g() ->\n  1 + true\n";
  auto r = driver::checkSource("main", "import broken\nfn main() ->\n  g()\n", {dir});
  REQUIRE_FALSE(r.ok());
  CHECK(fs::path(r.diagnostics[0].file).filename() == "broken.nv");
  CHECK(r.diagnostics[0].span.line == 2);
  fs::remove_all(dir);
}

TEST_CASE("imports resolve through the search path") {
  auto r = driver::checkSource("main", "import mathlib\nfn main() ->\n  square(7)\n", {nvtest::corpusDir() / "modules"});
  REQUIRE(r.ok());
  CHECK(driver::run(*r.unit).valueText == "49");
  auto docs = driver::emitCore(*r.unit);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].module == "mathlib");
  CHECK(docs[1].module == "main");
}

TEST_CASE("search path includes NVLANG_PATH") {
  ::setenv("NVLANG_PATH", "/x:/y", 1);
  auto p = driver::searchPath({"/a"});
  ::unsetenv("NVLANG_PATH");
  CHECK(p == std::vector<fs::path>{"/a", "/x", "/y"});
}

TEST_CASE("corpus headers") {
  auto c = driver::readCase(nvtest::corpusDir() / "reject" / "non_exhaustive.nv");
  REQUIRE(c.has_value());
  CHECK_FALSE(c->expectOk);
  CHECK(c->errorKind == "MissingCases");
  CHECK(c->mentions == std::vector<std::string>{"Err"});

  c = driver::readCase(nvtest::corpusDir() / "listings" / "workers.nv");
  REQUIRE(c.has_value());
  CHECK(c->expectOk);
  CHECK(c->stdoutLines == std::vector<std::string>{"30", "30", "300"});

  CHECK_FALSE(driver::readCase(nvtest::corpusDir() / "modules" / "mathlib.nv").has_value());
}

TEST_CASE("every corpus case passes") {
  auto cases = driver::collectCases(nvtest::corpusDir());
  CHECK(cases.size() >= 20);
  for (const auto& c : cases) {
    auto out = driver::runCase(c, 42, {c.file.parent_path()});
    INFO(c.file.string(), " ", out.detail);
    CHECK(out.passed);
    CHECK(out.reachedCodegen == c.expectOk);
  }
}

TEST_CASE("dumps do not change the outcome") {
  auto r = driver::checkFile(nvtest::corpusDir() / "listings" / "counter.nv");
  REQUIRE(r.ok());
  auto before = driver::run(*r.unit);
  CHECK(driver::dumpTokens(*r.unit).find("12:7 keyword receive") != std::string::npos);
  CHECK(driver::dumpTypes(*r.unit).find("main : fn() -> Future[Int]") != std::string::npos);
  CHECK(driver::dumpActors(*r.unit).find("Stop -> stop") != std::string::npos);
  CHECK(driver::dumpAnf(*r.unit).find("actor Counter(self)") != std::string::npos);
  CHECK_FALSE(driver::dumpAst(*r.unit).empty());
  auto after = driver::run(*r.unit);
  CHECK(before.output == after.output);
  CHECK(before.valueText == after.valueText);
}

TEST_CASE("bench rows carry values and deterministic step counts") {
  auto a = driver::bench(nvtest::corpusDir() / "bench", 3);
  auto b = driver::bench(nvtest::corpusDir() / "bench", 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].ok);
    CHECK(a[k].steps == b[k].steps);
  }
}
