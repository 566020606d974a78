#pragma once

#include <memory>
#include <string>

#include "nvlang/actorcheck.hpp"
#include "nvlang/infer.hpp"
#include "nvlang/parser.hpp"
#include "nvlang/runtime.hpp"

namespace nvtest {

/// A checked program. Held by pointer since the typing side tables point
/// into the AST.
struct Compiled {
  nvlang::syntax::SourceProgram program;
  nvlang::types::TypedProgram typed;
  nvlang::actors::ActorTable table;
};

inline std::unique_ptr<Compiled> check(nvlang::syntax::SourceProgram program) {
  auto c = std::make_unique<Compiled>();
  c->program = std::move(program);
  c->typed = nvlang::types::inferProgram(c->program);
  c->table = nvlang::actors::checkActors(c->program, c->typed);
  return c;
}

inline std::unique_ptr<Compiled> check(const std::string& source) { return check(nvlang::syntax::parseSource(source)); }

inline nvlang::rt::RunResult run(const Compiled& c, nvlang::rt::RunOptions options = {}) {
  return nvlang::rt::evalProgram(c.program, c.typed, c.table, std::move(options));
}

inline nvlang::rt::RunResult run(const std::string& source, nvlang::rt::RunOptions options = {}) {
  auto c = check(source);
  return run(*c, std::move(options));
}

/// Runs the ANF-lowered form of an already checked program.
inline nvlang::rt::RunResult runLowered(const Compiled& c, nvlang::rt::RunOptions options = {}) {
  auto lowered = check(nvlang::rt::anfLowered(c.program));
  return run(*lowered, std::move(options));
}

}  // namespace nvtest
