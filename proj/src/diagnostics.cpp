#include "nvlang/diagnostics.hpp"

namespace nvlang {

std::string_view errorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Lex: return "LexError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Cycle: return "CycleError";
    case ErrorKind::MissingModule: return "MissingModule";
    case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::OccursCheck: return "OccursCheck";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::UnknownType: return "UnknownType";
    case ErrorKind::UnknownConstructor: return "UnknownConstructor";
    case ErrorKind::WrongArity: return "WrongArity";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::SendToNonPid: return "SendToNonPid";
    case ErrorKind::AwaitOnNonFuture: return "AwaitOnNonFuture";
    case ErrorKind::MissingCases: return "MissingCases";
    case ErrorKind::AnnotationTooGeneral: return "AnnotationTooGeneral";
    case ErrorKind::UnknownActor: return "UnknownActor";
    case ErrorKind::NoReceiveBlock: return "NoReceiveBlock";
    case ErrorKind::NonUniformReply: return "NonUniformReply";
    case ErrorKind::ReplyOutsideReceive: return "ReplyOutsideReceive";
    case ErrorKind::BreakOutsideLoop: return "BreakOutsideLoop";
    case ErrorKind::MessageTypeNotADT: return "MessageTypeNotADT";
    case ErrorKind::UnknownActorChild: return "UnknownActorChild";
    case ErrorKind::ChildArgTypeMismatch: return "ChildArgTypeMismatch";
    case ErrorKind::DuplicateChildId: return "DuplicateChildId";
  }
  return "Error";
}

}  // namespace nvlang
