#include "chorm/transform.hpp"

#include "chorm/ast_ops.hpp"

namespace chorm {

namespace {

struct Simplifier {
    SessChan k;
    std::vector<ThreadId> order{};
    std::set<ThreadId> seen{};

    void touch(const ThreadId& t) {
        if (seen.insert(t).second) order.push_back(t);
    }

    Participant as_self(const ThreadId& t) {
        touch(t);
        return {t, RoleName{t.value}};
    }

    ChorPtr walk(const ChorPtr& c) {
        return std::visit(
            overload{
                [&](const SeqNode& n) -> ChorPtr {
                    return std::visit(
                        overload{
                            [&](const StartEta&) { return walk(n.cont); },
                            [&](const ComEta& m) {
                                Participant s = as_self(m.sender.thread);
                                Participant r = as_self(m.receiver.thread);
                                return seq(ComEta{s, m.expr, r, m.bind_var, k}, walk(n.cont));
                            },
                            [&](const SelEta& s) {
                                Participant f = as_self(s.from.thread);
                                Participant t = as_self(s.to.thread);
                                return seq(SelEta{f, t, k, s.label}, walk(n.cont));
                            },
                        },
                        n.head);
                },
                [&](const CondNode& n) -> ChorPtr {
                    ChorPtr t = walk(n.then_branch); // then before else fixes the thread order
                    ChorPtr e = walk(n.else_branch);
                    return cond(n.at, n.guard, std::move(t), std::move(e));
                },
                [&](const RecNode& n) -> ChorPtr { return rec(n.var, walk(n.body)); },
                [&](const CallNode& n) -> ChorPtr { return rec_call(n.var); },
                [&](const ResNode& n) -> ChorPtr { return walk(n.body); },
                [&](const InactNode&) -> ChorPtr { return inact(); },
            },
            c->node);
    }
};

} // namespace

Result<MergeResult, TransformError> simplify(const ChorPtr& c, const SessChan& k) {
    if (sessions_mentioned(c).count(k))
        return TransformError{"session " + k.value + " is not fresh: it already occurs in the choreography"};
    Simplifier s{k};
    ChorPtr merged = s.walk(c);
    return MergeResult{std::move(merged), std::move(s.order), k};
}

ChorPtr synthesize_start(const MergeResult& m, const PublicChan& a) {
    if (m.threads_in_order.size() < 2) return m.merged;
    std::vector<Participant> parts;
    parts.reserve(m.threads_in_order.size());
    for (const auto& t : m.threads_in_order) parts.push_back({t, RoleName{t.value}});
    return seq(StartEta{std::move(parts), a, m.session}, m.merged);
}

Result<ChorPtr, TransformError> merge(const ChorPtr& c, const SessChan& k, const PublicChan& a) {
    auto s = simplify(c, k);
    if (!s.ok()) return s.error();
    return synthesize_start(s.value(), a);
}

} // namespace chorm
