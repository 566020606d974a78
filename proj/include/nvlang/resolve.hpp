#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvlang/ast.hpp"

namespace nvlang::resolve {

struct SourceFile {
  std::string path;
  std::string text;
};

struct Module {
  std::string name;
  std::uint32_t file = 0;
  syntax::SourceProgram program;
  std::vector<std::string> imports;
};

struct ModuleGraph {
  std::map<std::string, Module> nodes;
  /// Dependencies before importers; ties broken by module name.
  std::vector<std::string> order;
  /// Indexed by Span::file.
  std::vector<SourceFile> files;
  std::string entry;
};

/// Returns (display path, source text) for a module name, or nullopt.
using Loader = std::function<std::optional<SourceFile>(const std::string& module)>;

ModuleGraph resolveWith(const std::string& entryName, SourceFile entry, const Loader& load);

/// Searches the entry file's directory, then `searchPaths` in order.
ModuleGraph resolve(const std::filesystem::path& entry, const std::vector<std::filesystem::path>& searchPaths);

/// Kahn's algorithm with a lexicographic ready set. `edges[m]` lists what m
/// imports. Throws CompileError(Cycle) naming the cycle path.
std::vector<std::string> topoOrder(const std::map<std::string, std::vector<std::string>>& edges);

/// All declarations in dependency order with Decl::module set. Top-level
/// names and constructor names must be unique across the whole program.
syntax::SourceProgram flatten(ModuleGraph& graph);

}  // namespace nvlang::resolve
