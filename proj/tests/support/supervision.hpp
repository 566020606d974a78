#pragma once

#include <string>
#include <vector>

#include "nvlang/runtime.hpp"
#include "support/pipeline.hpp"

namespace nvtest {

inline const char* kCounter = R"(type CounterMsg =
  | Increment
  | Get
  | Boom
  | Stop

actor Counter
  fn run(self) ->
    loop
      receive msg: CounterMsg
        Increment -> reply 1
        Get -> reply 0
        Boom -> reply crash("boom")
        Stop -> break
)";

/// Counter actor plus `supervisor S` over one Counter child per policy.
inline std::string supervised(const char* strategy, const std::vector<std::string>& policies, const char* limit = "") {
  std::string src = std::string(kCounter) + "\nsupervisor S\n  strategy " + strategy + "\n" + limit + "  children\n";
  for (std::size_t k = 0; k < policies.size(); ++k) {
    src += "    c" + std::to_string(k) + ": Counter(), " + policies[k] + "\n";
  }
  return src + "\nfn main() ->\n  0\n";
}

enum class Fate { Untouched, Restarted, Dead };

struct Observed {
  std::vector<Fate> fates;
  std::vector<std::int64_t> before, after;
  bool supervisorAlive = false;
  /// Replaced pids are dead and their replacements alive.
  bool consistent = true;
};

/// Starts S, ends child `failed` (crash or normal exit) and classifies what
/// happened to each child.
inline Observed observe(const char* strategy, const std::vector<std::string>& policies, std::size_t failed,
                        bool abnormal) {
  auto c = check(supervised(strategy, policies));
  nvlang::rt::Machine m(c->program, c->typed, c->table);
  auto sup = m.spawn("S");
  m.runUntilQuiescent();
  Observed o;
  o.before = m.children(sup);
  if (abnormal) {
    m.crash(o.before[failed], "boom");
  } else {
    m.stop(o.before[failed]);
  }
  m.runUntilQuiescent();
  o.after = m.children(sup);
  for (std::size_t j = 0; j < o.before.size(); ++j) {
    if (o.after[j] != o.before[j]) {
      o.consistent = o.consistent && !m.alive(o.before[j]) && m.alive(o.after[j]);
      o.fates.push_back(Fate::Restarted);
    } else {
      o.fates.push_back(m.alive(o.before[j]) ? Fate::Untouched : Fate::Dead);
    }
  }
  o.supervisorAlive = m.alive(sup);
  return o;
}

// OTP semantics written out directly from the strategy definitions.
inline std::vector<Fate> expectedFates(const std::string& strategy, const std::vector<std::string>& policies,
                                       std::size_t failed, bool abnormal) {
  const std::string& own = policies[failed];
  bool restart = own == "permanent" || (own == "transient" && abnormal);
  std::vector<Fate> out;
  for (std::size_t j = 0; j < policies.size(); ++j) {
    bool affected = strategy == "one_for_all" || (strategy == "rest_for_one" && j >= failed) || j == failed;
    if (!restart) {
      out.push_back(j == failed ? Fate::Dead : Fate::Untouched);
    } else if (!affected) {
      out.push_back(Fate::Untouched);
    } else if (j != failed && policies[j] == "temporary") {
      out.push_back(Fate::Dead);
    } else {
      out.push_back(Fate::Restarted);
    }
  }
  return out;
}

/// Crashes the first `crashes` of `children` permanent Counter children at
/// once under one_for_one with the default intensity; returns whether S
/// survived.
inline bool survivesBurst(std::size_t children, std::size_t crashes) {
  auto c = check(supervised("one_for_one", std::vector<std::string>(children, "permanent")));
  nvlang::rt::Machine m(c->program, c->typed, c->table);
  auto sup = m.spawn("S");
  m.runUntilQuiescent();
  auto kids = m.children(sup);
  for (std::size_t k = 0; k < crashes; ++k) m.crash(kids[k], "boom");
  m.runUntilQuiescent();
  return m.alive(sup);
}

}  // namespace nvtest
