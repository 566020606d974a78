#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace nvlang::rt {

enum class VKind : std::uint8_t { Int, Float, Bool, String, Unit, Tuple, List, Ctor, Pid, Future, Closure };

struct Node;
struct EnvCell;
using EnvPtr = std::shared_ptr<const EnvCell>;

/// Immutable runtime value. Compound payloads are shared, which is
/// indistinguishable from copying since nothing is ever mutated.
struct Value {
  VKind kind = VKind::Unit;
  std::int64_t i = 0;  // Int, Bool, Pid, Future target, Ctor tag, Closure global index
  std::int64_t j = 0;  // Future correlation ref
  double f = 0;
  std::shared_ptr<const void> ptr;

  static Value integer(std::int64_t v);
  static Value floating(double v);
  static Value boolean(bool v);
  static Value string(std::string s);
  static Value unit();
  static Value tuple(std::vector<Value> items);
  static Value ctor(int tag, std::vector<Value> fields);
  static Value nil();
  static Value cons(Value head, Value tail);
  static Value list(const std::vector<Value>& items);
  static Value pid(std::int64_t p);
  static Value future(std::int64_t target, std::int64_t ref);

  const std::string& str() const { return *static_cast<const std::string*>(ptr.get()); }
  /// Tuple members / constructor fields.
  const std::vector<Value>& items() const;
  bool isNil() const { return kind == VKind::List && !ptr; }
  const Value& head() const;
  const Value& tail() const;
  std::vector<Value> listItems() const;
};

struct ConsCell {
  Value head;
  Value tail;
  ConsCell(Value h, Value t) : head(std::move(h)), tail(std::move(t)) {}
  ~ConsCell();  // iterative, so long lists do not recurse
};

struct ClosureData {
  const Node* lambda = nullptr;
  EnvPtr env;
};

struct EnvCell {
  int sym;
  Value value;
  EnvPtr next;
};

bool operator==(const Value& a, const Value& b);
inline bool operator!=(const Value& a, const Value& b) { return !(a == b); }

/// Ordering for `<` etc. on numbers (the only ordered types).
int compareNumbers(const Value& a, const Value& b);

/// Rendering of values in Erlang term syntax, as `io:format("~p")` prints
/// the compiled representation. Constructor tags map to atoms through
/// `atomOf`.
class Renderer {
 public:
  using AtomFn = std::string (*)(const void* ctx, int tag);
  Renderer(AtomFn atomOf, const void* ctx) : atomOf_(atomOf), ctx_(ctx) {}

  std::string render(const Value& v) const;
  static std::string formatFloat(double d);

 private:
  void write(const Value& v, std::string& out) const;
  AtomFn atomOf_;
  const void* ctx_;
};

}  // namespace nvlang::rt
