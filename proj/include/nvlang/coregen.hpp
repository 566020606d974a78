#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nvlang/actorcheck.hpp"
#include "nvlang/anf.hpp"
#include "nvlang/ast.hpp"
#include "nvlang/infer.hpp"
#include "nvlang/value_repr.hpp"

namespace nvlang::coregen {

struct CoreOptions {
  /// `{Caller, Msg}` / `{response, V}` wire tuples without correlation refs.
  bool plainWireFormat = false;
  anf::OperandOrder order = anf::OperandOrder::LeftToRight;
  /// Module name for declarations that do not belong to a resolved module.
  std::string defaultModule = "main";
};

struct CoreDoc {
  std::string module;
  std::vector<std::pair<std::string, int>> exports;                // sorted
  std::vector<std::pair<std::string, std::string>> definitions;   // ("'f'/n", fun text)
  std::string text() const;
};

/// `x` -> `X`; names already starting with `_` or an uppercase letter are kept.
std::string mangleVar(const std::string& name);

/// Lowercased function names, unique per (name, arity) across the program.
class FunctionNames {
 public:
  /// Returns the emitted name, assigning one on first use.
  const std::string& assign(const std::string& source, int arity);
  const std::string& get(const std::string& source) const;
  void reserve(const std::string& name, int arity);

 private:
  std::map<std::string, std::string> names_;
  std::map<std::string, std::vector<int>> taken_;
};

/// One document per module, in the program's declaration order.
std::vector<CoreDoc> emitProgram(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                                 const actors::ActorTable& table, const CoreOptions& options = {});

/// The single-module case.
CoreDoc emitModule(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                   const actors::ActorTable& table, const CoreOptions& options = {});

struct ErlcResult {
  bool available = false;
  bool ok = false;
  std::string log;
};

/// Compiles `doc` with `erlc +from_core` in `workDir` when an Erlang compiler
/// is on PATH; `available` is false otherwise.
ErlcResult validateWithErlc(const CoreDoc& doc, const std::filesystem::path& workDir);
bool erlcAvailable();

}  // namespace nvlang::coregen
