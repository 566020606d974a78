#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "nvlang/driver.hpp"

namespace fs = std::filesystem;
using namespace nvlang;

namespace {

struct Dumps {
  bool tokens = false, ast = false, types = false, actors = false, anf = false, core = false;

  void add(CLI::App* cmd) {
    cmd->add_flag("--dump-tokens", tokens, "print the token stream");
    cmd->add_flag("--dump-ast", ast, "pretty-print the flattened program");
    cmd->add_flag("--dump-types", types, "print inferred types of top-level bindings");
    cmd->add_flag("--dump-actors", actors, "print actor and supervisor analysis");
    cmd->add_flag("--dump-anf", anf, "print the ANF form");
    cmd->add_flag("--dump-core", core, "print the generated Core Erlang");
  }

  void print(const driver::Compilation& c) const {
    if (tokens) std::cout << driver::dumpTokens(c);
    if (ast) std::cout << driver::dumpAst(c);
    if (types) std::cout << driver::dumpTypes(c);
    if (actors) std::cout << driver::dumpActors(c);
    if (anf) std::cout << driver::dumpAnf(c);
    if (core) {
      for (const auto& doc : driver::emitCore(c)) std::cout << doc.text();
    }
  }
};

struct Config {
  std::string file;
  std::vector<std::string> paths;
  std::uint64_t seed = 42;
  std::string trace;
  std::string emit = "core";
  std::string outDir = ".";
  bool plainWire = false;
  bool validateErlc = false;
  Dumps dumps;
};

std::vector<fs::path> searchPaths(const Config& cfg) {
  std::vector<fs::path> extra(cfg.paths.begin(), cfg.paths.end());
  return driver::searchPath(extra);
}

std::unique_ptr<driver::Compilation> load(const Config& cfg) {
  auto r = driver::checkFile(cfg.file, searchPaths(cfg));
  for (const auto& d : r.diagnostics) std::cerr << driver::format(d) << "\n";
  if (r.ok()) cfg.dumps.print(*r.unit);
  return std::move(r.unit);
}

int cmdCheck(const Config& cfg) { return load(cfg) ? 0 : 1; }

int cmdBuild(const Config& cfg) {
  auto unit = load(cfg);
  if (!unit) return 1;
  if (cfg.emit == "none") return 0;
  coregen::CoreOptions options;
  options.plainWireFormat = cfg.plainWire;
  fs::create_directories(cfg.outDir);
  int status = 0;
  for (const auto& doc : driver::emitCore(*unit, options)) {
    fs::path out = fs::path(cfg.outDir) / (doc.module + ".core");
    std::ofstream(out) << doc.text();
    std::cout << "wrote " << out.string() << "\n";
    if (cfg.validateErlc) {
      auto v = coregen::validateWithErlc(doc, cfg.outDir);
      if (!v.available) {
        std::cout << "erlc not found; skipping validation\n";
      } else if (!v.ok) {
        std::cerr << doc.module << ": erlc rejected the module\n" << v.log;
        status = 1;
      }
    }
  }
  return status;
}

int cmdRun(const Config& cfg) {
  auto unit = load(cfg);
  if (!unit) return 1;
  rt::RunOptions options;
  options.seed = cfg.seed;
  options.recordTrace = !cfg.trace.empty();
  auto r = driver::run(*unit, options);
  std::cout << r.output;
  if (!cfg.trace.empty()) std::ofstream(cfg.trace) << rt::traceJsonl(r.trace);
  if (r.status != rt::RunResult::Status::Normal) {
    std::cerr << cfg.file << ": " << rt::statusName(r.status) << ": " << r.error << "\n";
    return 1;
  }
  return 0;
}

int cmdBench(const std::string& dir, std::uint64_t seed) {
  auto rows = driver::bench(dir, seed);
  bool ok = !rows.empty();
  fmt::print("{:<20} {:>12} {:>10} {:>10}  {}\n", "benchmark", "steps", "messages", "ms", "value");
  for (const auto& r : rows) {
    fmt::print("{:<20} {:>12} {:>10} {:>10.2f}  {}{}\n", r.name, r.steps, r.messages, r.millis, r.value,
               r.ok ? "" : fmt::format("  (expected {})", r.expected));
    ok = ok && r.ok;
  }
  return ok ? 0 : 1;
}

int cmdTestCorpus(const std::vector<std::string>& roots, const Config& cfg) {
  int passed = 0, failed = 0;
  for (const auto& root : roots) {
    for (const auto& c : driver::collectCases(root)) {
      auto paths = searchPaths(cfg);
      paths.push_back(c.file.parent_path());
      auto out = driver::runCase(c, cfg.seed, paths);
      if (out.passed) {
        ++passed;
        fmt::print("PASS {}\n", c.file.string());
      } else {
        ++failed;
        fmt::print("FAIL {}: {}\n", c.file.string(), out.detail);
      }
    }
  }
  fmt::print("{} passed, {} failed\n", passed, failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NVLang compiler and reference interpreter"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("file", cfg.file, "entry .nv file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--path", cfg.paths, "extra module search directory (repeatable)");
    cfg.dumps.add(cmd);
  };

  auto* check = app.add_subcommand("check", "parse, resolve, type-check and analyze actors");
  common(check);

  auto* build = app.add_subcommand("build", "check and write <module>.core files");
  common(build);
  build->add_option("--emit", cfg.emit, "emission target")->check(CLI::IsMember({"core", "none"}));
  build->add_option("-o,--out-dir", cfg.outDir, "output directory");
  build->add_flag("--plain-wire", cfg.plainWire, "emit two-element message tuples without refs");
  build->add_flag("--validate-erlc", cfg.validateErlc, "compile the output with erlc +from_core when available");

  auto* run = app.add_subcommand("run", "run on the reference interpreter");
  common(run);
  run->add_option("--seed", cfg.seed, "scheduler seed");
  run->add_option("--trace", cfg.trace, "write the event trace as JSON lines");

  std::string benchDir = NVLANG_CORPUS_DIR "/bench";
  auto* bench = app.add_subcommand("bench", "run the bundled benchmarks and check their values");
  bench->add_option("dir", benchDir, "benchmark directory")->check(CLI::ExistingDirectory);
  bench->add_option("--seed", cfg.seed, "scheduler seed");

  std::vector<std::string> roots{NVLANG_CORPUS_DIR};
  auto* corpus = app.add_subcommand("test-corpus", "run every annotated .nv file under the given directories");
  corpus->add_option("dirs", roots, "corpus directories")->check(CLI::ExistingDirectory);
  corpus->add_option("--path", cfg.paths, "extra module search directory (repeatable)");
  corpus->add_option("--seed", cfg.seed, "scheduler seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmdCheck(cfg);
    if (*build) return cmdBuild(cfg);
    if (*run) return cmdRun(cfg);
    if (*bench) return cmdBench(benchDir, cfg.seed);
    if (*corpus) return cmdTestCorpus(roots, cfg);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
