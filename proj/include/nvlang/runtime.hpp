#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nvlang/actorcheck.hpp"
#include "nvlang/ast.hpp"
#include "nvlang/infer.hpp"
#include "nvlang/value.hpp"

namespace nvlang::rt {

struct RunOptions {
  std::uint64_t seed = 42;
  int budget = 100;                         // evaluation steps per turn
  std::uint64_t maxSteps = 500'000'000;     // whole-run guard
  bool recordTrace = true;
  std::string entry = "main";
};

/// kind is one of spawn, send, deliver, receive, reply, await, crash,
/// restart, exit, drop.
struct Event {
  std::uint64_t tick = 0;
  std::string kind;
  std::int64_t pid = 0;
  std::string detail;
};

struct RunResult {
  enum class Status { Normal, Crashed, Deadlock, StepLimit };
  Status status = Status::Normal;
  Value value;
  std::string valueText;  // rendered exit value
  std::string output;     // everything printed
  std::vector<Event> trace;
  std::string error;      // crash reason or deadlock report
  std::uint64_t steps = 0;
  std::uint64_t ticks = 0;
  std::uint64_t messages = 0;
};

std::string statusName(RunResult::Status s);

/// One JSON object per line: {"tick", "kind", "pid", "detail"}.
std::string traceJsonl(const std::vector<Event>& trace);

class Machine {
 public:
  Machine(const syntax::SourceProgram& program, const types::TypedProgram& typed, const actors::ActorTable& table,
          RunOptions options = {});
  ~Machine();
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  /// Spawns the entry function as the root process and runs to completion.
  RunResult run();

  // Finer control, used by supervision tests.
  std::int64_t spawnRoot();
  std::int64_t spawn(const std::string& actorOrSupervisor);
  void runUntilQuiescent();
  void crash(std::int64_t pid, const std::string& reason);
  /// Normal exit, as if the process's body had returned.
  void stop(std::int64_t pid);
  bool alive(std::int64_t pid) const;
  std::vector<std::int64_t> children(std::int64_t supervisor) const;
  RunResult result() const;
  std::uint64_t tick() const;
  std::string render(const Value& v) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult evalProgram(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                      const actors::ActorTable& table, RunOptions options = {});

/// Same program with every function and actor body replaced by its ANF
/// form lowered back to expressions.
syntax::SourceProgram anfLowered(const syntax::SourceProgram& program);

}  // namespace nvlang::rt
