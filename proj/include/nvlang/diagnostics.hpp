#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nvlang {

/// Location of a token or node inside one source buffer.
struct Span {
  std::uint32_t file = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
};

enum class ErrorKind {
  // syntax
  Lex,
  Parse,
  // resolve
  Cycle,
  MissingModule,
  DuplicateDefinition,
  // typesys
  TypeMismatch,
  OccursCheck,
  UnboundVariable,
  UnknownType,
  UnknownConstructor,
  WrongArity,
  NotAFunction,
  SendToNonPid,
  AwaitOnNonFuture,
  MissingCases,
  AnnotationTooGeneral,
  // actorcheck
  UnknownActor,
  NoReceiveBlock,
  NonUniformReply,
  ReplyOutsideReceive,
  BreakOutsideLoop,
  MessageTypeNotADT,
  UnknownActorChild,
  ChildArgTypeMismatch,
  DuplicateChildId,
};

std::string_view errorKindName(ErrorKind kind);

/// Every phase reports user-facing problems by throwing this.
class CompileError : public std::runtime_error {
 public:
  CompileError(ErrorKind kind, Span span, std::string message)
      : std::runtime_error(message), kind_(kind), span_(span) {}

  ErrorKind kind() const { return kind_; }
  const Span& span() const { return span_; }
  /// Source path, when known at the throw site (resolve fills it in).
  const std::string& path() const { return path_; }
  void setPath(std::string path) { path_ = std::move(path); }

 private:
  ErrorKind kind_;
  Span span_;
  std::string path_;
};

/// Broken internal invariant (a bug in this compiler, not in the program).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nvlang
