#include "nvlang/driver.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nvlang/anf.hpp"
#include "nvlang/lexer.hpp"
#include "nvlang/parser.hpp"

namespace nvlang::driver {

namespace fs = std::filesystem;

std::string format(const Diagnostic& d) {
  return fmt::format("{}:{}:{}: error: [{}] {}", d.file.empty() ? "<input>" : d.file, d.span.line, d.span.column,
                     errorKindName(d.kind), d.message);
}

namespace {

std::optional<resolve::SourceFile> readSource(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return resolve::SourceFile{p.string(), ss.str()};
}

CheckResult checkWith(const std::function<resolve::ModuleGraph()>& load) {
  CheckResult r;
  auto c = std::make_unique<Compilation>();
  try {
    c->graph = load();
    c->program = resolve::flatten(c->graph);
    c->typed = types::inferProgram(c->program);
    c->table = actors::checkActors(c->program, c->typed);
  } catch (const CompileError& e) {
    Diagnostic d{e.path(), e.span(), e.kind(), e.what()};
    if (d.file.empty() && e.span().file < c->graph.files.size()) d.file = c->graph.files[e.span().file].path;
    r.diagnostics.push_back(std::move(d));
    return r;
  }
  r.unit = std::move(c);
  return r;
}

}  // namespace

std::vector<fs::path> searchPath(const std::vector<fs::path>& extra) {
  std::vector<fs::path> out = extra;
  if (const char* env = std::getenv("NVLANG_PATH")) {
    std::stringstream ss(env);
    std::string part;
    while (std::getline(ss, part, ':')) {
      if (!part.empty()) out.emplace_back(part);
    }
  }
  return out;
}

CheckResult checkFile(const fs::path& entry, const std::vector<fs::path>& searchPaths) {
  return checkWith([&] { return resolve::resolve(entry, searchPaths); });
}

CheckResult checkSource(const std::string& name, const std::string& text, const std::vector<fs::path>& searchPaths) {
  return checkWith([&] {
    return resolve::resolveWith(name, resolve::SourceFile{name + ".nv", text},
                                [&](const std::string& module) -> std::optional<resolve::SourceFile> {
                                  for (const auto& dir : searchPaths) {
                                    auto p = dir / (module + ".nv");
                                    if (fs::exists(p)) return readSource(p);
                                  }
                                  return std::nullopt;
                                });
  });
}

std::string dumpTokens(const Compilation& c) {
  std::string out;
  for (const auto& file : c.graph.files) {
    out += "# " + file.path + "\n";
    for (const auto& t : syntax::tokenize(file.text)) {
      out += fmt::format("{}:{} {} {}\n", t.span.line, t.span.column, syntax::tokenKindName(t.kind),
                         t.kind == syntax::TokenKind::Newline ? "" : t.lexeme);
    }
  }
  return out;
}

std::string dumpAst(const Compilation& c) { return syntax::prettyPrint(c.program); }

std::string dumpTypes(const Compilation& c) {
  std::string out;
  for (const auto& d : c.program.decls) {
    if (const auto* f = std::get_if<syntax::FnDecl>(&d.node)) {
      out += f->name + " : " + types::typeString(c.typed.env.globals.at(f->name)) + "\n";
    }
  }
  for (const auto& [name, adt] : c.typed.env.adts) {
    out += "type " + name;
    if (!adt.params.empty()) {
      out += "[";
      for (std::size_t k = 0; k < adt.params.size(); ++k) out += (k ? ", " : "") + adt.params[k];
      out += "]";
    }
    out += " = ";
    for (std::size_t k = 0; k < adt.ctors.size(); ++k) out += (k ? " | " : "") + adt.ctors[k];
    out += "\n";
  }
  for (const auto& [name, sig] : c.typed.env.actors) {
    out += (sig.supervisor ? "supervisor " : "actor ") + name;
    if (!sig.supervisor) out += " : " + types::typeString(types::Type::pid(sig.messageType));
    out += "\n";
  }
  return out;
}

std::string dumpActors(const Compilation& c) {
  std::string out;
  for (const auto& [name, info] : c.table.actors) {
    out += fmt::format("actor {} receives {} replies {}\n", name, types::typeString(info.messageType),
                       types::typeString(info.uniformReply));
    for (const auto& [ctor, t] : info.replyMap) out += fmt::format("  {} -> {}\n", ctor, types::typeString(t));
    for (const auto& ctor : info.terminating) out += fmt::format("  {} -> stop\n", ctor);
  }
  for (const auto& [name, spec] : c.table.supervisors) {
    out += fmt::format("supervisor {} {} restarts {} within {}\n", name, syntax::strategyName(spec.strategy),
                       spec.maxRestarts, spec.window);
    for (const auto& child : spec.children) {
      out += fmt::format("  {}: {} {}\n", child.id, child.actor, syntax::policyName(child.policy));
    }
  }
  return out;
}

std::string dumpAnf(const Compilation& c, anf::OperandOrder order) {
  std::string out;
  for (const auto& f : anf::toAnf(c.program, order)) {
    std::string params;
    for (std::size_t k = 0; k < f.params.size(); ++k) params += (k ? ", " : "") + f.params[k];
    out += fmt::format("{} {}({}) =\n", f.isActor ? "actor" : "fn", f.name, f.isActor ? f.selfName : params);
    std::istringstream body(anf::toString(*f.body));
    std::string line;
    while (std::getline(body, line)) out += "  " + line + "\n";
    out += "\n";
  }
  return out;
}

std::vector<coregen::CoreDoc> emitCore(const Compilation& c, coregen::CoreOptions options) {
  if (!c.graph.entry.empty()) options.defaultModule = c.graph.entry;
  return coregen::emitProgram(c.program, c.typed, c.table, options);
}

rt::RunResult run(const Compilation& c, rt::RunOptions options) {
  return rt::evalProgram(c.program, c.typed, c.table, std::move(options));
}

std::optional<CorpusCase> readCase(const fs::path& file) {
  auto src = readSource(file);
  if (!src) return std::nullopt;
  CorpusCase c;
  c.file = file;
  bool sawExpect = false;
  std::istringstream in(src->text);
  std::string line;
  while (std::getline(in, line) && line.rfind('#', 0) == 0) {
    auto value = [&](const char* key) -> std::optional<std::string> {
      std::string prefix = std::string("# ") + key + ":";
      if (line.rfind(prefix, 0) != 0) return std::nullopt;
      std::string v = line.substr(prefix.size());
      if (!v.empty() && v[0] == ' ') v.erase(0, 1);
      return v;
    };
    if (auto v = value("expect")) {
      sawExpect = true;
      if (v->rfind("error", 0) == 0) {
        c.expectOk = false;
        c.errorKind = v->size() > 6 ? v->substr(6) : "";
      }
    } else if (auto s = value("stdout")) {
      c.stdoutLines.push_back(*s);
    } else if (auto r = value("value")) {
      c.value = *r;
    } else if (auto m = value("mentions")) {
      c.mentions.push_back(*m);
    }
  }
  if (!sawExpect) return std::nullopt;
  return c;
}

std::vector<CorpusCase> collectCases(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".nv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusCase> out;
  for (const auto& f : files) {
    if (auto c = readCase(f)) out.push_back(std::move(*c));
  }
  return out;
}

CaseOutcome runCase(const CorpusCase& spec, std::uint64_t seed, const std::vector<fs::path>& searchPaths) {
  CaseOutcome out{spec, false, "", 0, false};
  auto checked = checkFile(spec.file, searchPaths);
  if (!spec.expectOk) {
    if (checked.ok()) {
      out.detail = "expected " + spec.errorKind + " but the program checked";
      return out;
    }
    const Diagnostic& d = checked.diagnostics.front();
    std::string text = format(d);
    if (!spec.errorKind.empty() && errorKindName(d.kind) != spec.errorKind) {
      out.detail = "wrong diagnostic: " + text;
      return out;
    }
    for (const auto& m : spec.mentions) {
      if (text.find(m) == std::string::npos) {
        out.detail = "diagnostic does not mention '" + m + "': " + text;
        return out;
      }
    }
    out.passed = true;
    out.detail = text;
    return out;
  }
  if (!checked.ok()) {
    out.detail = format(checked.diagnostics.front());
    return out;
  }
  emitCore(*checked.unit);
  out.reachedCodegen = true;
  rt::RunOptions options;
  options.seed = seed;
  options.recordTrace = false;
  auto r = run(*checked.unit, options);
  out.steps = r.steps;
  if (r.status != rt::RunResult::Status::Normal) {
    out.detail = rt::statusName(r.status) + ": " + r.error;
    return out;
  }
  std::string expected;
  for (const auto& l : spec.stdoutLines) expected += l + "\n";
  if (!spec.stdoutLines.empty() && r.output != expected) {
    out.detail = "stdout differs:\n" + r.output;
    return out;
  }
  if (spec.value && r.valueText != *spec.value) {
    out.detail = "value " + r.valueText + ", expected " + *spec.value;
    return out;
  }
  out.passed = true;
  return out;
}

std::vector<BenchRow> bench(const fs::path& dir, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  for (const auto& c : collectCases(dir)) {
    BenchRow row;
    row.name = c.file.stem().string();
    row.expected = c.value.value_or("");
    auto checked = checkFile(c.file);
    if (!checked.ok()) {
      row.value = format(checked.diagnostics.front());
      rows.push_back(row);
      continue;
    }
    rt::RunOptions options;
    options.seed = seed;
    options.recordTrace = false;
    auto start = std::chrono::steady_clock::now();
    auto r = run(*checked.unit, options);
    row.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.value = r.status == rt::RunResult::Status::Normal ? r.valueText : rt::statusName(r.status) + ": " + r.error;
    row.ok = r.status == rt::RunResult::Status::Normal && (!c.value || r.valueText == *c.value);
    row.steps = r.steps;
    row.messages = r.messages;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nvlang::driver
