#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/result.hpp"

namespace chorm {

// ------------------------------------------------------------ environment ----

struct Signature {
    std::vector<Sort> args;
    Sort ret;
    friend bool operator==(const Signature&, const Signature&) = default;
};

// A builtin is scripted: successive calls consume `values` cyclically.
struct BuiltinFn {
    Signature sig;
    std::vector<Value> values;
};

// Script cursors live here and travel with every step result; stepping is
// pure and never mutates a shared environment.
struct BuiltinEnv {
    std::map<std::string, BuiltinFn> functions;
    std::map<std::pair<ThreadId, VarName>, Value> bindings; // free-variable values per thread
    std::map<std::string, size_t> cursors;
};

enum class EvalErrorKind { UnboundVar, UnknownBuiltin, SortMismatch, Arity };

struct EvalError {
    EvalErrorKind kind;
    std::string message;
};

struct EvalOk {
    Value value;
    BuiltinEnv env;
};

// Evaluates at a given thread: free variables resolve through (thread, name).
Result<EvalOk, EvalError> eval_expr(const ExprPtr& e, BuiltinEnv env, const ThreadId& at);

// ----------------------------------------------------------------- events ----

struct EvStart {
    std::vector<Participant> participants;
    PublicChan chan;
    SessChan session;
};
struct EvCom {
    Participant sender;
    Value value;
    Participant receiver;
    VarName var;
    SessChan session;
};
struct EvSel {
    Participant from;
    Participant to;
    SessChan session;
    Label label;
};
struct EvCond {
    ThreadId at;
    bool result;
};

using Event = std::variant<EvStart, EvCom, EvSel, EvCond>;

std::string event_text(const Event& ev);

// ---------------------------------------------------------------- stepping ----

struct Stuck {};
struct Stepped {
    Event event;
    ChorPtr after;
    BuiltinEnv env;
};
struct StepError {
    EvalError error;
    std::string path; // where evaluation failed
};

using StepResult = std::variant<Stuck, Stepped, StepError>;

// One reduction of the unique redex (start/com/sel/if at the head, under
// (nu k) binders, unfolding a head rec first). Recursion unfolding alpha-
// freshens start/res-bound sessions in each spliced copy so stepping
// preserves well-formedness.
StepResult step(const ChorPtr& c, const BuiltinEnv& env);

// body[X := rec X { body }] with fresh bound sessions per spliced copy.
// `avoid` must contain every session name in play and accumulates the
// fresh ones.
ChorPtr unfold_rec_term(const ChorPtr& rec_term, std::set<SessChan>& avoid);

// --------------------------------------------------------------------- run ----

struct TraceStep {
    Event event;
    ChorPtr after;
};

struct Trace {
    std::vector<TraceStep> steps;
    bool fuel_exhausted = false; // stopped by fuel with more behaviour pending
    int start_count = 0;
    std::optional<StepError> error;
    BuiltinEnv final_env;
};

Trace run(const ChorPtr& c, const BuiltinEnv& env, int fuel);

} // namespace chorm
