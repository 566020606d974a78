#include "nvlang/resolve.hpp"

#include <fmt/format.h>

#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "nvlang/parser.hpp"

namespace nvlang::resolve {

namespace {

// DFS for a cycle reachable from `start`, reported as [a, b, ..., a].
std::optional<std::vector<std::string>> findCycle(const std::map<std::string, std::vector<std::string>>& edges) {
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::optional<std::vector<std::string>> found;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    color[n] = 1;
    stack.push_back(n);
    auto it = edges.find(n);
    if (it != edges.end()) {
      std::vector<std::string> succ = it->second;
      std::sort(succ.begin(), succ.end());
      for (const auto& m : succ) {
        if (found) return;
        if (color[m] == 1) {
          std::vector<std::string> cyc(std::find(stack.begin(), stack.end(), m), stack.end());
          cyc.push_back(m);
          found = cyc;
          return;
        }
        if (color[m] == 0) visit(m);
      }
    }
    stack.pop_back();
    color[n] = 2;
  };
  for (const auto& [n, _] : edges) {
    if (found) break;
    if (color[n] == 0) visit(n);
  }
  return found;
}

std::string joinNames(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

std::vector<std::string> topoOrder(const std::map<std::string, std::vector<std::string>>& edges) {
  std::map<std::string, int> pending;
  std::map<std::string, std::vector<std::string>> importers;
  for (const auto& [n, deps] : edges) {
    pending.emplace(n, 0);
    std::set<std::string> uniq(deps.begin(), deps.end());
    for (const auto& d : uniq) {
      pending.emplace(d, 0);
      ++pending[n];
      importers[d].push_back(n);
    }
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [n, c] : pending) {
    if (c == 0) ready.push(n);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string n = ready.top();
    ready.pop();
    order.push_back(n);
    for (const auto& imp : importers[n]) {
      if (--pending[imp] == 0) ready.push(imp);
    }
  }
  if (order.size() != pending.size()) {
    auto cyc = findCycle(edges);
    throw CompileError(ErrorKind::Cycle, Span{},
                       fmt::format("import cycle: [{}]", cyc ? joinNames(*cyc) : std::string("?")));
  }
  return order;
}

ModuleGraph resolveWith(const std::string& entryName, SourceFile entry, const Loader& load) {
  ModuleGraph g;
  g.entry = entryName;
  std::vector<std::pair<std::string, SourceFile>> work{{entryName, std::move(entry)}};
  std::map<std::string, std::vector<std::string>> edges;
  while (!work.empty()) {
    auto [name, file] = std::move(work.back());
    work.pop_back();
    if (g.nodes.count(name)) continue;
    Module m;
    m.name = name;
    m.file = static_cast<std::uint32_t>(g.files.size());
    g.files.push_back(file);
    try {
      m.program = syntax::parseSource(g.files.back().text, m.file);
      for (const auto& imp : m.program.imports) {
        m.imports.push_back(imp.name);
        if (g.nodes.count(imp.name) || imp.name == name) continue;
        bool queued = std::any_of(work.begin(), work.end(), [&](const auto& w) { return w.first == imp.name; });
        if (queued) continue;
        auto loaded = load(imp.name);
        if (!loaded) {
          throw CompileError(ErrorKind::MissingModule, imp.span, fmt::format("module '{}' not found", imp.name));
        }
        work.emplace_back(imp.name, std::move(*loaded));
      }
    } catch (CompileError& e) {
      if (e.path().empty()) e.setPath(g.files.back().path);
      throw;
    }
    edges[name] = m.imports;
    g.nodes.emplace(name, std::move(m));
  }
  g.order = topoOrder(edges);
  return g;
}

ModuleGraph resolve(const std::filesystem::path& entry, const std::vector<std::filesystem::path>& searchPaths) {
  auto read = [](const std::filesystem::path& p) -> std::optional<SourceFile> {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return SourceFile{p.string(), ss.str()};
  };
  auto entryFile = read(entry);
  if (!entryFile) throw CompileError(ErrorKind::MissingModule, Span{}, fmt::format("cannot read {}", entry.string()));
  std::vector<std::filesystem::path> dirs{entry.parent_path().empty() ? "." : entry.parent_path()};
  dirs.insert(dirs.end(), searchPaths.begin(), searchPaths.end());
  Loader loader = [&](const std::string& name) -> std::optional<SourceFile> {
    for (const auto& d : dirs) {
      auto p = d / (name + ".nv");
      if (std::filesystem::exists(p)) return read(p);
    }
    return std::nullopt;
  };
  return resolveWith(entry.stem().string(), std::move(*entryFile), loader);
}

syntax::SourceProgram flatten(ModuleGraph& graph) {
  syntax::SourceProgram out;
  std::map<std::string, std::string> owner;
  std::map<std::string, std::string> ctorOwner;
  auto claim = [](std::map<std::string, std::string>& table, const std::string& name, const std::string& mod,
                  Span span, std::string_view what) {
    auto [it, fresh] = table.emplace(name, mod);
    if (!fresh) {
      throw CompileError(ErrorKind::DuplicateDefinition, span,
                         fmt::format("{} '{}' is already defined in module '{}'", what, name, it->second));
    }
  };
  for (const auto& name : graph.order) {
    auto& mod = graph.nodes.at(name);
    for (auto& d : mod.program.decls) {
      d.module = name;
      claim(owner, d.name(), name, d.span, "name");
      if (auto* td = std::get_if<syntax::TypeDecl>(&d.node)) {
        for (const auto& c : td->ctors) claim(ctorOwner, c.name, name, c.span, "constructor");
      }
      out.decls.push_back(std::move(d));
    }
    mod.program.decls.clear();
  }
  return out;
}

}  // namespace nvlang::resolve
