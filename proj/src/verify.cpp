#include "chorm/verify.hpp"

#include <functional>

#include "chorm/ast_ops.hpp"
#include "chorm/printer.hpp"
#include "chorm/transform.hpp"

namespace chorm {

// -------------------------------------------------------------- reductions ----

namespace {

void enumerate_rules(const ChorPtr& c, const BuiltinEnv& env, std::set<SessChan>& avoid,
                     ReductionSet& out, const std::function<ChorPtr(ChorPtr)>& wrap) {
    std::visit(
        overload{
            [&](const SeqNode& n) {
                std::visit(
                    overload{
                        [&](const StartEta& s) {
                            out.successors.push_back(
                                {EvStart{s.participants, s.chan, s.session}, wrap(res(s.session, n.cont))});
                        },
                        [&](const ComEta& m) {
                            auto v = eval_expr(m.expr, env, m.sender.thread);
                            if (!v.ok()) {
                                if (!out.error) out.error = StepError{v.error(), pretty(Eta{m})};
                                return;
                            }
                            out.successors.push_back(
                                {EvCom{m.sender, v.value().value, m.receiver, m.bind_var, m.session},
                                 wrap(substitute(n.cont, m.bind_var, v.value().value))});
                        },
                        [&](const SelEta& s) {
                            out.successors.push_back({EvSel{s.from, s.to, s.session, s.label}, wrap(n.cont)});
                        },
                    },
                    n.head);
            },
            [&](const CondNode& n) {
                auto v = eval_expr(n.guard, env, n.at);
                if (!v.ok() || value_sort(v.value().value) != Sort::Bool) {
                    if (!out.error)
                        out.error = StepError{v.ok() ? EvalError{EvalErrorKind::SortMismatch,
                                                                 "conditional guard is not a bool"}
                                                     : v.error(),
                                              "if @" + n.at.value};
                    return;
                }
                bool b = std::get<bool>(v.value().value);
                out.successors.push_back({EvCond{n.at, b}, wrap(b ? n.then_branch : n.else_branch)});
            },
            [&](const RecNode&) {
                ChorPtr unfolded = unfold_rec_term(c, avoid);
                enumerate_rules(unfolded, env, avoid, out, wrap);
            },
            [&](const CallNode&) {},
            [&](const ResNode& n) {
                SessChan k = n.session;
                auto inner_wrap = [k, &wrap](ChorPtr body) { return wrap(res(k, std::move(body))); };
                enumerate_rules(n.body, env, avoid, out, inner_wrap);
            },
            [&](const InactNode&) {},
        },
        c->node);
}

} // namespace

ReductionSet reductions(const ChorPtr& c, const BuiltinEnv& env) {
    ReductionSet out;
    std::set<SessChan> avoid = sessions_mentioned(c);
    std::function<ChorPtr(ChorPtr)> identity = [](ChorPtr x) { return x; };
    enumerate_rules(c, env, avoid, out, identity);
    // dedupe modulo alpha-renaming
    std::vector<std::pair<Event, ChorPtr>> unique;
    for (auto& s : out.successors) {
        bool seen = false;
        for (auto& u : unique)
            if (event_text(u.first) == event_text(s.first) && alpha_equal(u.second, s.second)) seen = true;
        if (!seen) unique.push_back(std::move(s));
    }
    out.successors = std::move(unique);
    return out;
}

// ------------------------------------------------------------ event matching ----

namespace {

bool roles_are_thread_names(const Participant& a) { return a.role.value == a.thread.value; }

// Transformed-side events must carry thread-named roles and agree with the
// original on threads and payload; sessions and original-side roles differ
// by construction and are ignored.
bool events_match(const Event& t, const Event& c) {
    if (auto* tc = std::get_if<EvCom>(&t)) {
        auto* cc = std::get_if<EvCom>(&c);
        if (!cc) return false;
        return roles_are_thread_names(tc->sender) && roles_are_thread_names(tc->receiver) &&
               tc->sender.thread == cc->sender.thread && tc->receiver.thread == cc->receiver.thread &&
               tc->var == cc->var && value_repr(tc->value) == value_repr(cc->value);
    }
    if (auto* ts = std::get_if<EvSel>(&t)) {
        auto* cs = std::get_if<EvSel>(&c);
        if (!cs) return false;
        return roles_are_thread_names(ts->from) && roles_are_thread_names(ts->to) &&
               ts->from.thread == cs->from.thread && ts->to.thread == cs->to.thread &&
               ts->label == cs->label;
    }
    if (auto* ti = std::get_if<EvCond>(&t)) {
        auto* ci = std::get_if<EvCond>(&c);
        if (!ci) return false;
        return ti->at == ci->at && ti->result == ci->result;
    }
    return false; // starts never match anything
}

constexpr int kStartBudget = 16; // erased starts tolerated between two matched events

// Stepping the original through a start also unfolds any recursion wrapped
// around it, so the simplified successor can run one or more head unfoldings
// ahead of a transformed term that stood still. Catch up by unfolding.
// Recursion unfolding mints fresh bound-session names as it splices copies,
// and one of them may collide with the merge session; since those names are
// bound (and erased by the rewrite anyway), alpha-rename them out of the way
// so the freshness precondition only ever fires on genuine free occurrences.
ChorPtr dodge_session(const ChorPtr& c, const SessChan& k) {
    std::set<SessChan> avoid = sessions_mentioned(c);
    if (!avoid.count(k)) return c;
    avoid.insert(k);
    return freshen_bound_sessions(c, avoid);
}

bool equal_modulo_head_unfold(const ChorPtr& simplified, ChorPtr t) {
    for (int i = 0; i < 32; ++i) {
        if (alpha_equal(simplified, t)) return true;
        if (!std::holds_alternative<RecNode>(t->node)) return false;
        std::set<SessChan> avoid = sessions_mentioned(t);
        t = unfold_rec_term(t, avoid);
    }
    return false;
}

struct Checker {
    Verdict v;
    std::vector<Event> trace{};

    explicit Checker(Property p) { v.property = p; }

    Verdict fail(const ChorPtr& at, std::optional<Event> ev, std::string why) {
        v.passed = false;
        v.counterexample = Counterexample{pretty(at), std::move(ev), std::move(why), trace};
        v.depth_checked = (int)v.steps.size();
        return std::move(v);
    }

    Verdict pass() {
        v.depth_checked = (int)v.steps.size();
        return std::move(v);
    }
};

} // namespace

// -------------------------------------------------------------- soundness ----

Verdict soundness_check_against(const ChorPtr& c, const SessChan& k, const ChorPtr& t0,
                                const BuiltinEnv& env, int depth) {
    Checker ck(Property::Soundness);
    ChorPtr t = t0;
    BuiltinEnv tenv = env;
    ChorPtr orig = c;
    BuiltinEnv cenv = env;

    for (int i = 0; i < depth; ++i) {
        StepResult r = step(t, tenv);
        if (std::holds_alternative<Stuck>(r)) return ck.pass();
        if (auto* e = std::get_if<StepError>(&r))
            return ck.fail(t, std::nullopt,
                           "transformed term raised an evaluation error: " + e->error.message);
        auto& ts = std::get<Stepped>(r);
        if (std::holds_alternative<EvStart>(ts.event))
            return ck.fail(t, ts.event, "transformed term performed a protocol start");

        // advance the original, treating its starts as invisible
        bool matched = false;
        std::string why;
        for (int budget = kStartBudget; budget >= 0; --budget) {
            StepResult cr = step(orig, cenv);
            if (std::holds_alternative<Stuck>(cr)) {
                why = "original is stuck but the transformed term stepped " + event_text(ts.event);
                break;
            }
            if (auto* e = std::get_if<StepError>(&cr)) {
                why = "original raised an evaluation error: " + e->error.message;
                break;
            }
            auto& cs = std::get<Stepped>(cr);
            if (std::holds_alternative<EvStart>(cs.event)) {
                if (budget == 0) {
                    why = "start allowance exhausted while matching " + event_text(ts.event);
                    break;
                }
                orig = cs.after;
                cenv = std::move(cs.env);
                continue;
            }
            if (!events_match(ts.event, cs.event)) {
                why = "event mismatch: transformed did " + event_text(ts.event) + ", original did " +
                      event_text(cs.event);
                break;
            }
            auto simp = simplify(dodge_session(cs.after, k), k);
            if (!simp.ok()) {
                why = "cannot simplify the original successor: " + simp.error().message;
                break;
            }
            if (!alpha_equal(ts.after, simp.value().merged)) {
                why = "terms diverge after matching " + event_text(ts.event);
                break;
            }
            orig = cs.after;
            cenv = std::move(cs.env);
            matched = true;
            break;
        }
        if (!matched) return ck.fail(t, ts.event, why);
        ck.v.steps.push_back({VerdictStep::Kind::Matched, ts.event});
        ck.trace.push_back(ts.event);
        t = ts.after;
        tenv = std::move(ts.env);
    }
    return ck.pass();
}

Verdict soundness_check(const ChorPtr& c, const SessChan& k, const BuiltinEnv& env, int depth) {
    auto s = simplify(c, k);
    if (!s.ok()) {
        Checker ck(Property::Soundness);
        return ck.fail(c, std::nullopt, s.error().message);
    }
    return soundness_check_against(c, k, s.value().merged, env, depth);
}

// ------------------------------------------------------------ completeness ----

Verdict completeness_check_against(const ChorPtr& c, const SessChan& k, const ChorPtr& t0,
                                   const BuiltinEnv& env, int depth) {
    Checker ck(Property::Completeness);
    ChorPtr t = t0;
    BuiltinEnv tenv = env;
    ChorPtr orig = c;
    BuiltinEnv cenv = env;

    for (int i = 0; i < depth; ++i) {
        StepResult cr = step(orig, cenv);
        if (std::holds_alternative<Stuck>(cr)) return ck.pass();
        if (std::get_if<StepError>(&cr)) return ck.pass(); // no original step to preserve
        auto& cs = std::get<Stepped>(cr);

        auto simp = simplify(dodge_session(cs.after, k), k);
        if (!simp.ok()) return ck.fail(orig, cs.event, "cannot simplify the successor: " + simp.error().message);

        if (std::holds_alternative<EvStart>(cs.event)) {
            // start erasure: the transformed side matches with zero steps
            if (!equal_modulo_head_unfold(simp.value().merged, t))
                return ck.fail(orig, cs.event,
                               "start step changes the simplified term: the transformed side cannot stand still");
            ck.v.steps.push_back({VerdictStep::Kind::PureStart, cs.event});
            ck.trace.push_back(cs.event);
            orig = cs.after;
            cenv = std::move(cs.env);
            continue;
        }

        StepResult tr = step(t, tenv);
        if (std::holds_alternative<Stuck>(tr))
            return ck.fail(orig, cs.event,
                           "transformed term is stuck but the original did " + event_text(cs.event));
        if (auto* e = std::get_if<StepError>(&tr))
            return ck.fail(orig, cs.event,
                           "transformed term raised an evaluation error: " + e->error.message);
        auto& ts = std::get<Stepped>(tr);
        if (!events_match(ts.event, cs.event))
            return ck.fail(orig, cs.event,
                           "event mismatch: original did " + event_text(cs.event) + ", transformed did " +
                               event_text(ts.event));
        if (!alpha_equal(ts.after, simp.value().merged))
            return ck.fail(orig, cs.event, "terms diverge after matching " + event_text(cs.event));

        ck.v.steps.push_back({VerdictStep::Kind::Matched, cs.event});
        ck.trace.push_back(cs.event);
        orig = cs.after;
        cenv = std::move(cs.env);
        t = ts.after;
        tenv = std::move(ts.env);
    }
    return ck.pass();
}

Verdict completeness_check(const ChorPtr& c, const SessChan& k, const BuiltinEnv& env, int depth) {
    auto s = simplify(c, k);
    if (!s.ok()) {
        Checker ck(Property::Completeness);
        return ck.fail(c, std::nullopt, s.error().message);
    }
    return completeness_check_against(c, k, s.value().merged, env, depth);
}

} // namespace chorm
