#include "nvlang/value.hpp"

#include <fmt/format.h>

#include <charconv>

#include "nvlang/diagnostics.hpp"
#include "nvlang/value_repr.hpp"

namespace nvlang::rt {

Value Value::integer(std::int64_t v) {
  Value x;
  x.kind = VKind::Int;
  x.i = v;
  return x;
}

Value Value::floating(double v) {
  Value x;
  x.kind = VKind::Float;
  x.f = v;
  return x;
}

Value Value::boolean(bool v) {
  Value x;
  x.kind = VKind::Bool;
  x.i = v ? 1 : 0;
  return x;
}

Value Value::string(std::string s) {
  Value x;
  x.kind = VKind::String;
  x.ptr = std::make_shared<const std::string>(std::move(s));
  return x;
}

Value Value::unit() { return Value{}; }

Value Value::tuple(std::vector<Value> items) {
  Value x;
  x.kind = VKind::Tuple;
  x.ptr = std::make_shared<const std::vector<Value>>(std::move(items));
  return x;
}

Value Value::ctor(int tag, std::vector<Value> fields) {
  Value x;
  x.kind = VKind::Ctor;
  x.i = tag;
  if (!fields.empty()) x.ptr = std::make_shared<const std::vector<Value>>(std::move(fields));
  return x;
}

Value Value::nil() {
  Value x;
  x.kind = VKind::List;
  return x;
}

Value Value::cons(Value head, Value tail) {
  Value x;
  x.kind = VKind::List;
  x.ptr = std::make_shared<const ConsCell>(std::move(head), std::move(tail));
  return x;
}

Value Value::list(const std::vector<Value>& items) {
  Value out = nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(*it, std::move(out));
  return out;
}

Value Value::pid(std::int64_t p) {
  Value x;
  x.kind = VKind::Pid;
  x.i = p;
  return x;
}

Value Value::future(std::int64_t target, std::int64_t ref) {
  Value x;
  x.kind = VKind::Future;
  x.i = target;
  x.j = ref;
  return x;
}

const std::vector<Value>& Value::items() const {
  static const std::vector<Value> empty;
  return ptr ? *static_cast<const std::vector<Value>*>(ptr.get()) : empty;
}

const Value& Value::head() const { return static_cast<const ConsCell*>(ptr.get())->head; }
const Value& Value::tail() const { return static_cast<const ConsCell*>(ptr.get())->tail; }

std::vector<Value> Value::listItems() const {
  std::vector<Value> out;
  for (const Value* v = this; !v->isNil(); v = &v->tail()) out.push_back(v->head());
  return out;
}

ConsCell::~ConsCell() {
  std::shared_ptr<const void> next = std::move(tail.ptr);
  while (next && next.use_count() == 1) {
    auto* cell = const_cast<ConsCell*>(static_cast<const ConsCell*>(next.get()));
    std::shared_ptr<const void> after = std::move(cell->tail.ptr);
    next = std::move(after);
  }
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case VKind::Int:
    case VKind::Bool:
    case VKind::Pid: return a.i == b.i;
    case VKind::Float: return a.f == b.f;
    case VKind::String: return a.str() == b.str();
    case VKind::Unit: return true;
    case VKind::Future: return a.i == b.i && a.j == b.j;
    case VKind::Ctor:
      if (a.i != b.i) return false;
      [[fallthrough]];
    case VKind::Tuple: {
      const auto& x = a.items();
      const auto& y = b.items();
      if (x.size() != y.size()) return false;
      for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] != y[k]) return false;
      }
      return true;
    }
    case VKind::List: {
      const Value* x = &a;
      const Value* y = &b;
      while (!x->isNil() && !y->isNil()) {
        if (x->ptr == y->ptr) return true;
        if (x->head() != y->head()) return false;
        x = &x->tail();
        y = &y->tail();
      }
      return x->isNil() && y->isNil();
    }
    case VKind::Closure: return a.ptr == b.ptr && a.i == b.i;
  }
  return false;
}

int compareNumbers(const Value& a, const Value& b) {
  if (a.kind == VKind::Float || b.kind == VKind::Float) {
    double x = a.kind == VKind::Float ? a.f : static_cast<double>(a.i);
    double y = b.kind == VKind::Float ? b.f : static_cast<double>(b.i);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
}

namespace {

// io_lib's default (latin1) printable-character test.
bool printableChar(std::int64_t c) {
  return (c >= 32 && c <= 126) || (c >= 160 && c <= 255) || c == '\n' || c == '\r' || c == '\t' || c == '\v' ||
         c == '\b' || c == '\f' || c == 27;
}

void writeQuoted(const std::string& s, std::string& out) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\v': out += "\\v"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case 27: out += "\\e"; break;
      default: out += static_cast<char>(c);
    }
  }
  out += '"';
}

}  // namespace

std::string Renderer::formatFloat(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  auto e = s.find('e');
  std::string mant = e == std::string::npos ? s : s.substr(0, e);
  if (mant.find('.') == std::string::npos && mant.find_first_of("in") == std::string::npos) mant += ".0";
  if (e == std::string::npos) return mant;
  std::string exp = s.substr(e + 1);
  if (!exp.empty() && exp[0] == '+') exp.erase(0, 1);
  return mant + "e" + exp;
}

std::string Renderer::render(const Value& v) const {
  std::string out;
  write(v, out);
  return out;
}

void Renderer::write(const Value& v, std::string& out) const {
  switch (v.kind) {
    case VKind::Int: out += std::to_string(v.i); return;
    case VKind::Float: out += formatFloat(v.f); return;
    case VKind::Bool: out += v.i ? "true" : "false"; return;
    case VKind::Unit: out += repr::kUnitAtom; return;
    case VKind::String: {
      // Strings are character lists once compiled.
      const std::string& s = v.str();
      bool printable = !s.empty();
      for (unsigned char c : s) printable = printable && printableChar(c);
      if (s.empty()) {
        out += "[]";
      } else if (printable) {
        writeQuoted(s, out);
      } else {
        out += '[';
        for (std::size_t k = 0; k < s.size(); ++k) {
          if (k) out += ',';
          out += std::to_string(static_cast<unsigned char>(s[k]));
        }
        out += ']';
      }
      return;
    }
    case VKind::Pid: out += fmt::format("<0.{}.0>", v.i); return;
    case VKind::Future: out += fmt::format("{{future,<0.{}.0>,#Ref<0.0.0.{}>}}", v.i, v.j); return;
    case VKind::Closure: out += "#Fun<nvlang>"; return;
    case VKind::Tuple:
    case VKind::Ctor: {
      std::string tag;
      if (v.kind == VKind::Ctor) {
        tag = atomOf_(ctx_, static_cast<int>(v.i));
        if (repr::atomNeedsQuotes(tag)) tag = repr::quoteAtom(tag);
        if (v.items().empty()) {
          out += tag;
          return;
        }
      }
      out += '{';
      bool first = true;
      if (!tag.empty()) {
        out += tag;
        first = false;
      }
      for (const auto& x : v.items()) {
        if (!first) out += ',';
        first = false;
        write(x, out);
      }
      out += '}';
      return;
    }
    case VKind::List: {
      auto items = v.listItems();
      bool printable = !items.empty();
      for (const auto& x : items) printable = printable && x.kind == VKind::Int && printableChar(x.i);
      if (printable) {
        std::string s;
        for (const auto& x : items) s += static_cast<char>(x.i);
        writeQuoted(s, out);
        return;
      }
      out += '[';
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (k) out += ',';
        write(items[k], out);
      }
      out += ']';
      return;
    }
  }
}

}  // namespace nvlang::rt
