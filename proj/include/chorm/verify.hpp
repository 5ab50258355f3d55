#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/semantics.hpp"

namespace chorm {

enum class Property { Soundness, Completeness };

struct Counterexample {
    std::string state_before;        // pretty term at the point of failure
    std::optional<Event> step_taken; // the unmatched step, when one fired
    std::string explanation;
    std::vector<Event> trace; // events successfully matched before the failure
};

struct VerdictStep {
    enum class Kind { Matched, PureStart } kind; // PureStart: matched by zero transformed-side steps
    Event event;
};

struct Verdict {
    Property property;
    bool passed = true;
    int depth_checked = 0;
    std::optional<Counterexample> counterexample;
    std::vector<VerdictStep> steps;
};

// Independent successor enumeration (applies every rule pattern and collects
// results, deduplicated up to alpha-renaming); the calculus is deterministic,
// so the set never exceeds one element.
struct ReductionSet {
    std::vector<std::pair<Event, ChorPtr>> successors;
    std::optional<StepError> error;
};

ReductionSet reductions(const ChorPtr& c, const BuiltinEnv& env);

// Bounded checks of the two halves of the transformation-correctness
// statement: the merged term adds no behaviour (soundness) and loses none up
// to start removal (completeness). Events are compared modulo session names
// and the role-to-thread-name renaming; start steps on the original side are
// invisible.
Verdict soundness_check(const ChorPtr& c, const SessChan& k, const BuiltinEnv& env, int depth);
Verdict completeness_check(const ChorPtr& c, const SessChan& k, const BuiltinEnv& env, int depth);

// Same checks but against a caller-supplied merged body (mutation testing).
Verdict soundness_check_against(const ChorPtr& c, const SessChan& k, const ChorPtr& t0,
                                const BuiltinEnv& env, int depth);
Verdict completeness_check_against(const ChorPtr& c, const SessChan& k, const ChorPtr& t0,
                                   const BuiltinEnv& env, int depth);

} // namespace chorm
