#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nvlang/actorcheck.hpp"
#include "nvlang/coregen.hpp"
#include "nvlang/diagnostics.hpp"
#include "nvlang/infer.hpp"
#include "nvlang/resolve.hpp"
#include "nvlang/runtime.hpp"

namespace nvlang::driver {

struct Diagnostic {
  std::string file;
  Span span;
  ErrorKind kind = ErrorKind::Parse;
  std::string message;
};

/// `file:line:col: error: [Kind] message`
std::string format(const Diagnostic& d);

/// Everything the front end produced for one entry file. Not movable: the
/// typing tables point into `program`.
struct Compilation {
  resolve::ModuleGraph graph;
  syntax::SourceProgram program;
  types::TypedProgram typed;
  actors::ActorTable table;

  Compilation() = default;
  Compilation(const Compilation&) = delete;
  Compilation& operator=(const Compilation&) = delete;
};

struct CheckResult {
  std::unique_ptr<Compilation> unit;  // null when diagnostics were reported
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return unit != nullptr; }
};

/// tokenize, parse, resolve, infer, actor analysis.
CheckResult checkFile(const std::filesystem::path& entry, const std::vector<std::filesystem::path>& searchPaths = {});
/// Same for an in-memory source; imports are looked up in `searchPaths`.
CheckResult checkSource(const std::string& name, const std::string& text,
                        const std::vector<std::filesystem::path>& searchPaths = {});

/// Search path from `NVLANG_PATH` (colon separated), after `extra`.
std::vector<std::filesystem::path> searchPath(const std::vector<std::filesystem::path>& extra);

std::string dumpTokens(const Compilation& c);
std::string dumpAst(const Compilation& c);
/// `name : scheme` per top-level function, then ADTs and actors.
std::string dumpTypes(const Compilation& c);
std::string dumpActors(const Compilation& c);
std::string dumpAnf(const Compilation& c, anf::OperandOrder order = anf::OperandOrder::LeftToRight);

std::vector<coregen::CoreDoc> emitCore(const Compilation& c, coregen::CoreOptions options = {});

rt::RunResult run(const Compilation& c, rt::RunOptions options = {});

/// Corpus file headers: `# expect: ok` or `# expect: error <Kind>`, plus
/// optional `# stdout:` lines, `# value:` and `# mentions:`.
struct CorpusCase {
  std::filesystem::path file;
  bool expectOk = true;
  std::string errorKind;
  std::vector<std::string> stdoutLines;
  std::optional<std::string> value;
  std::vector<std::string> mentions;
};

std::optional<CorpusCase> readCase(const std::filesystem::path& file);

struct CaseOutcome {
  CorpusCase spec;
  bool passed = false;
  std::string detail;
  std::uint64_t steps = 0;
  bool reachedCodegen = false;
};

CaseOutcome runCase(const CorpusCase& c, std::uint64_t seed = 42,
                    const std::vector<std::filesystem::path>& searchPaths = {});

/// Every `.nv` file with an `# expect:` header under `root`, recursively, sorted.
std::vector<CorpusCase> collectCases(const std::filesystem::path& root);

struct BenchRow {
  std::string name;
  std::string value;
  std::string expected;
  bool ok = false;
  std::uint64_t steps = 0;
  std::uint64_t messages = 0;
  double millis = 0;
};

std::vector<BenchRow> bench(const std::filesystem::path& dir, std::uint64_t seed = 42);

}  // namespace nvlang::driver
