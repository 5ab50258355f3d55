#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/ast_ops.hpp"
#include "chorm/result.hpp"
#include "chorm/semantics.hpp" // Signature

namespace chorm {

// ------------------------------------------------------------ environments ----

// Public protocol bindings: which global type each public channel starts.
using Gamma = std::map<PublicChan, TypePtr>;

// One running session: what remains of its protocol, and which thread was
// cast into each role at start time.
struct SessionState {
    TypePtr residual;
    std::map<RoleName, ThreadId> cast;
};

using Delta = std::map<SessChan, SessionState>;

// Sorts of in-scope variables per thread, plus builtin signatures.
struct SortEnv {
    std::map<std::pair<ThreadId, VarName>, Sort> vars;
    std::map<std::string, Signature> sigs;
};

enum class SortErrorKind { Unbound, Arity, Mismatch };

struct SortError {
    SortErrorKind kind;
    std::string message;
};

struct TypeReport {
    bool ok = true;
    std::vector<Diagnostic> errors;
    std::set<SessChan> completed_sessions;
};

// ------------------------------------------------------------- operations ----

Result<Sort, SortError> sort_of(const ExprPtr& e, const SortEnv& env, const ThreadId& at);

// Symbolic walk checking that every session follows its protocol: starts
// bind role casts, coms/sels consume the residual type in order, both
// conditional branches are checked, and a recursion call must return to the
// environment snapshotted at its binder (completed sessions excluded).
TypeReport typecheck(const Gamma& gamma, const ChorPtr& c, Delta delta, SortEnv sorts);

// Pair the choreography's public channels with named protocols.  Explicit
// "CHANNEL=PROTOCOL" entries win; remaining channels take a protocol of the
// same name when one exists; if the leftover channels and protocols then
// line up one-to-one they are paired positionally (channels in order of
// first occurrence, protocols in name order).  Fails with a usage message
// otherwise.
Result<Gamma, std::string> auto_bind(const ChorPtr& c,
                                     const std::map<std::string, TypePtr>& protocols,
                                     const std::vector<std::string>& binds);

} // namespace chorm
