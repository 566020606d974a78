#pragma once

#include <random>
#include <string>
#include <vector>

namespace nvtest {

/// Random well-typed NVLang programs whose `main` returns an Int. Calls to
/// `tap` print their argument, so operand evaluation order shows up on stdout.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  static const char* prelude() {
    return R"(type Option[T] =
  | Some(value: T)
  | None

fn tap(x) ->
  print(x)
  x

fn f2(a, b) ->
  a * 2 + b

fn unwrap_or(o, d) ->
  case o
    Some(v) -> v
    None -> d

fn sum(xs) ->
  case xs
    [] -> 0
    h :: t -> h + sum(t)

fn pick(b, x, y) ->
  if b then x else y
)";
  }

  std::string program(int statements = 4, int depth = 3) {
    scope_.clear();
    std::string body;
    for (int i = 0; i < statements; ++i) {
      if (pick(3) == 0) {
        body += "  print(" + intExpr(depth) + ")\n";
      } else {
        std::string v = "v" + std::to_string(i);
        body += "  let " + v + " = " + intExpr(depth) + "\n";
        scope_.push_back(v);
      }
    }
    body += "  " + intExpr(depth) + "\n";
    return std::string(prelude()) + "\nfn main() ->\n" + body;
  }

  std::string intExpr(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(11)) {
      case 0: return "(" + intExpr(depth - 1) + " + " + intExpr(depth - 1) + ")";
      case 1: return "(" + intExpr(depth - 1) + " - " + intExpr(depth - 1) + ")";
      case 2: return "(" + intExpr(depth - 1) + " * " + intExpr(depth - 1) + ")";
      case 3: return "(if " + boolExpr(depth - 1) + " then " + intExpr(depth - 1) + " else " + intExpr(depth - 1) + ")";
      case 4: return "f2(" + intExpr(depth - 1) + ", " + intExpr(depth - 1) + ")";
      case 5: return "tap(" + intExpr(depth - 1) + ")";
      case 6: return "unwrap_or(" + optExpr(depth - 1) + ", " + intExpr(depth - 1) + ")";
      case 7: return "sum([" + intExpr(depth - 1) + ", " + intExpr(depth - 1) + ", " + intExpr(depth - 1) + "])";
      case 8: return "(fn(x) -> x + " + intExpr(depth - 1) + ")(" + intExpr(depth - 1) + ")";
      case 9: return "pick(" + boolExpr(depth - 1) + ", " + intExpr(depth - 1) + ", " + intExpr(depth - 1) + ")";
      default: return leaf();
    }
  }

  std::string boolExpr(int depth) {
    static const char* cmps[] = {"<", "<=", ">", ">=", "==", "!="};
    switch (depth <= 0 ? 3 + pick(2) : pick(5)) {
      case 0:
      case 1: return "(" + intExpr(depth - 1) + " " + cmps[pick(6)] + " " + intExpr(depth - 1) + ")";
      case 2: return "(" + boolExpr(depth - 1) + (pick(2) ? " && " : " || ") + boolExpr(depth - 1) + ")";
      case 3: return pick(2) ? "true" : "false";
      default: return "(" + leaf() + " < " + leaf() + ")";
    }
  }

  std::string optExpr(int depth) { return pick(3) ? "Some(" + intExpr(depth) + ")" : "None"; }

  int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

 private:
  std::string leaf() {
    if (!scope_.empty() && pick(2)) return scope_[static_cast<std::size_t>(pick(static_cast<int>(scope_.size())))];
    return std::to_string(pick(10));
  }

  std::mt19937_64 rng_;
  std::vector<std::string> scope_;
};

}  // namespace nvtest
