#pragma once

#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/result.hpp"

namespace chorm {

struct MergeResult {
    ChorPtr merged;
    std::vector<ThreadId> threads_in_order; // first occurrence in the interactions
    SessChan session;
};

struct TransformError {
    std::string message;
};

// Rewrites every interaction of C onto the single session k: starts and
// restrictions are dropped, each thread's role becomes its own name. k must
// be fresh for C.
Result<MergeResult, TransformError> simplify(const ChorPtr& c, const SessChan& k);

// Prepends the one start that the simplified body needs, with the threads in
// first-occurrence order; bodies touching fewer than two threads need no
// session and are returned unchanged.
ChorPtr synthesize_start(const MergeResult& m, const PublicChan& a);

Result<ChorPtr, TransformError> merge(const ChorPtr& c, const SessChan& k, const PublicChan& a);

} // namespace chorm
