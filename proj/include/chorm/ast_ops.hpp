#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chorm/ast.hpp"

namespace chorm {

// ------------------------------------------------------ structural equality

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
bool eta_equal(const Eta& a, const Eta& b);
bool chor_equal(const ChorPtr& a, const ChorPtr& b);
bool type_equal(const TypePtr& a, const TypePtr& b);

// --------------------------------------------------------------- queries ----

struct Diagnostic {
    std::string path;    // breadcrumb into the term, e.g. "rec X > if @f > then > sel f->c"
    std::string message;
};

// Checks, accumulating one diagnostic per violation:
//   - all start prefixes use pairwise distinct session channels
//   - every recursion call is bound and guarded (an eta or a conditional
//     occurs between the binder and the call)
//   - eta shape: >=2 start participants with distinct threads and distinct
//     roles; com/sel endpoints on distinct threads
//   - no start on a session channel already bound by an enclosing (nu k)
//     or start
std::vector<Diagnostic> well_formed(const ChorPtr& c);

// Session channels used by some eta and not bound by an enclosing (nu k)
// or introduced by a dominating start.
std::set<SessChan> free_sessions(const ChorPtr& c);

// Every session channel appearing anywhere (bound or free). Used for
// freshness checks.
std::set<SessChan> sessions_mentioned(const ChorPtr& c);

// Public channels named by start actions, in order of first occurrence.
std::vector<PublicChan> public_channels(const ChorPtr& c);

// Number of choreography nodes (seq/cond/rec/call/res/inact).
int node_count(const ChorPtr& c);

// -------------------------------------------------------------- substitute

// Capture-avoiding substitution of the closed value v for free occurrences
// of x in expressions of c. A com prefix binding x shields its continuation.
ChorPtr substitute(const ChorPtr& c, const VarName& x, const Value& v);
ExprPtr substitute_expr(const ExprPtr& e, const VarName& x, const Value& v);

// Capture-avoiding substitution of a choreography for free occurrences of
// the recursion variable x. Session binders in r's way are freshened.
// `fresh_avoid` accumulates every name considered in use.
ChorPtr substitute_call(const ChorPtr& body, const ChorRecVar& x, const ChorPtr& r,
                        std::set<SessChan>& fresh_avoid);

// Alpha-renames every start/res-bound session channel in c to a fresh name
// not in `avoid` (deterministic smallest-unused "base_n" scheme), extending
// `avoid` as it goes.
ChorPtr freshen_bound_sessions(const ChorPtr& c, std::set<SessChan>& avoid);

// Smallest "base", "base_1", "base_2", ... not in avoid; inserts the result.
SessChan fresh_session(const SessChan& base, std::set<SessChan>& avoid);

// ------------------------------------------------------------------ alpha ----

// Canonical form under alpha-renaming of bound value variables, bound
// session channels (res- and start-bound) and recursion variables; also
// garbage-collects (nu k) 0 to 0 and orders adjacent (nu k) binders by
// first use. If sort_start_participants, start participant lists are
// additionally sorted (set comparison for golden outputs).
ChorPtr alpha_canonical(const ChorPtr& c, bool sort_start_participants = false);

bool alpha_equal(const ChorPtr& a, const ChorPtr& b);
bool alpha_equal_start_insensitive(const ChorPtr& a, const ChorPtr& b);

TypePtr alpha_canonical_type(const TypePtr& g);
bool alpha_equal_type(const TypePtr& a, const TypePtr& b);

// ------------------------------------------------------------ type utils ----

// Free type variable check / contractivity / role collection.
std::set<RoleName> type_roles(const TypePtr& g);
bool type_closed(const TypePtr& g);
// Every rec body reaches a com/choice before its variable (no rec t. t).
bool type_contractive(const TypePtr& g);

TypePtr substitute_type_var(const TypePtr& body, const TypeRecVar& t, const TypePtr& r);

// Unfolds top-level rec binders until the head is com/choice/end.
// Requires a closed contractive type.
TypePtr unfold_head(TypePtr g);

// Equality of closed contractive types up to unfolding and alpha (regular
// tree bisimulation).
bool type_equal_unfolded(const TypePtr& a, const TypePtr& b);

} // namespace chorm
