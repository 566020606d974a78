#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nvlang/ast.hpp"
#include "nvlang/infer.hpp"

namespace nvlang::actors {

using types::Type;

struct ActorInfo {
  std::string name;
  Type messageType;
  std::map<std::string, Type> replyMap;  // non-terminating constructors only
  Type uniformReply;
  std::set<std::string> terminating;     // handlers that end in break without replying
};

struct ChildSpec {
  std::string id;
  std::string actor;
  bool isSupervisor = false;
  syntax::RestartPolicy policy = syntax::RestartPolicy::Permanent;
};

struct SupervisorSpec {
  std::string name;
  syntax::Strategy strategy = syntax::Strategy::OneForOne;
  std::vector<ChildSpec> children;  // start order
  int maxRestarts = 3;
  int window = 5;
};

struct ActorTable {
  std::map<std::string, ActorInfo> actors;
  std::map<std::string, SupervisorSpec> supervisors;
};

ActorInfo analyzeActor(const syntax::SourceProgram& program, const types::TypedProgram& typed,
                       const syntax::ActorDecl& actor);

SupervisorSpec checkSupervisor(const types::TypedProgram& typed, const syntax::SupervisorDecl& sup, Span span);

/// Analyzes every actor and supervisor and checks that each break sits in
/// tail position of its loop body. Throws CompileError.
ActorTable checkActors(const syntax::SourceProgram& program, const types::TypedProgram& typed);

/// Reply type of a send of `ctor`; terminating constructors get the uniform
/// reply type even though their future is never fulfilled.
Type replyTypeOf(const ActorInfo& info, const std::string& ctor);

/// Indices of the children restarted when child `failed` exits.
std::vector<std::size_t> restartSet(syntax::Strategy strategy, std::size_t childCount, std::size_t failed);

/// Whether a child with this policy is restarted after an exit.
bool restartsAfter(syntax::RestartPolicy policy, bool abnormal);

}  // namespace nvlang::actors
