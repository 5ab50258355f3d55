#include "chorm/semantics.hpp"

#include "chorm/ast_ops.hpp"
#include "chorm/printer.hpp"

namespace chorm {

// ------------------------------------------------------------- evaluation ----

namespace {

Result<EvalOk, EvalError> eval_rec(const ExprPtr& e, BuiltinEnv env, const ThreadId& at) {
    using R = Result<EvalOk, EvalError>;
    return std::visit(
        overload{
            [&](const LitExpr& n) -> R { return EvalOk{n.value, std::move(env)}; },
            [&](const VarExpr& n) -> R {
                auto it = env.bindings.find({at, n.name});
                if (it == env.bindings.end())
                    return EvalError{EvalErrorKind::UnboundVar,
                                     "unbound variable " + n.name.value + " at thread " + at.value};
                return EvalOk{it->second, std::move(env)};
            },
            [&](const CallExpr& n) -> R {
                auto it = env.functions.find(n.fn);
                if (it == env.functions.end())
                    return EvalError{EvalErrorKind::UnknownBuiltin, "unknown builtin " + n.fn};
                const Signature sig = it->second.sig;
                if (sig.args.size() != n.args.size())
                    return EvalError{EvalErrorKind::Arity,
                                     "builtin " + n.fn + " expects " + std::to_string(sig.args.size()) +
                                         " argument(s), got " + std::to_string(n.args.size())};
                for (size_t i = 0; i < n.args.size(); ++i) {
                    auto r = eval_rec(n.args[i], std::move(env), at);
                    if (!r.ok()) return r.error();
                    if (value_sort(r.value().value) != sig.args[i])
                        return EvalError{EvalErrorKind::SortMismatch,
                                         "argument " + std::to_string(i + 1) + " of " + n.fn + " has sort " +
                                             sort_name(value_sort(r.value().value)) + ", expected " +
                                             sort_name(sig.args[i])};
                    env = std::move(r.value().env);
                }
                const auto& fn = env.functions.at(n.fn);
                if (fn.values.empty())
                    return EvalError{EvalErrorKind::UnknownBuiltin, "builtin " + n.fn + " has no scripted values"};
                size_t& cur = env.cursors[n.fn];
                Value v = fn.values[cur % fn.values.size()];
                ++cur;
                if (value_sort(v) != fn.sig.ret)
                    return EvalError{EvalErrorKind::SortMismatch,
                                     "scripted value of " + n.fn + " has sort " + sort_name(value_sort(v)) +
                                         ", expected " + sort_name(fn.sig.ret)};
                return EvalOk{std::move(v), std::move(env)};
            },
            [&](const BinOpExpr& n) -> R {
                auto l = eval_rec(n.lhs, std::move(env), at);
                if (!l.ok()) return l.error();
                auto r = eval_rec(n.rhs, std::move(l.value().env), at);
                if (!r.ok()) return r.error();
                const Value& lv = l.value().value;
                const Value& rv = r.value().value;
                BuiltinEnv out = std::move(r.value().env);
                switch (n.op) {
                case BinOp::Eq:
                    if (value_sort(lv) != value_sort(rv))
                        return EvalError{EvalErrorKind::SortMismatch,
                                         std::string("== compares ") + sort_name(value_sort(lv)) + " against " +
                                             sort_name(value_sort(rv))};
                    return EvalOk{Value{lv == rv}, std::move(out)};
                case BinOp::Add:
                    if (value_sort(lv) != Sort::Int || value_sort(rv) != Sort::Int)
                        return EvalError{EvalErrorKind::SortMismatch, "+ needs int operands"};
                    return EvalOk{Value{std::get<std::int64_t>(lv) + std::get<std::int64_t>(rv)}, std::move(out)};
                case BinOp::Concat:
                    if (value_sort(lv) != Sort::String || value_sort(rv) != Sort::String)
                        return EvalError{EvalErrorKind::SortMismatch, "++ needs string operands"};
                    return EvalOk{Value{std::get<std::string>(lv) + std::get<std::string>(rv)}, std::move(out)};
                }
                return EvalError{EvalErrorKind::SortMismatch, "unknown operator"};
            },
        },
        e->node);
}

} // namespace

Result<EvalOk, EvalError> eval_expr(const ExprPtr& e, BuiltinEnv env, const ThreadId& at) {
    return eval_rec(e, std::move(env), at);
}

std::string event_text(const Event& ev) {
    return std::visit(
        overload{
            [](const EvStart& e) {
                std::string out = "start";
                for (const auto& p : e.participants) out += " " + p.thread.value + "[" + p.role.value + "]";
                return out + " on " + e.chan.value + " as " + e.session.value;
            },
            [](const EvCom& e) {
                return "com " + e.sender.thread.value + " -> " + e.receiver.thread.value + " : " +
                       value_repr(e.value) + " over " + e.session.value;
            },
            [](const EvSel& e) {
                return "sel " + e.from.thread.value + " -> " + e.to.thread.value + " : " + e.label.value +
                       " over " + e.session.value;
            },
            [](const EvCond& e) { return "if @" + e.at.value + " : " + std::string(e.result ? "true" : "false"); },
        },
        ev);
}

// ---------------------------------------------------------------- stepping ----

ChorPtr unfold_rec_term(const ChorPtr& rec_term, std::set<SessChan>& avoid) {
    const auto& r = std::get<RecNode>(rec_term->node);
    return substitute_call(r.body, r.var, rec_term, avoid);
}

namespace {

StepResult step_at(const ChorPtr& c, const BuiltinEnv& env, std::set<SessChan>& avoid) {
    return std::visit(
        overload{
            [&](const SeqNode& n) -> StepResult {
                return std::visit(
                    overload{
                        [&](const StartEta& s) -> StepResult {
                            // C|Start: the started session becomes restricted
                            return Stepped{EvStart{s.participants, s.chan, s.session},
                                           res(s.session, n.cont), env};
                        },
                        [&](const ComEta& m) -> StepResult {
                            auto v = eval_expr(m.expr, env, m.sender.thread);
                            if (!v.ok()) return StepError{v.error(), pretty(Eta{m})};
                            ChorPtr after = substitute(n.cont, m.bind_var, v.value().value);
                            return Stepped{EvCom{m.sender, v.value().value, m.receiver, m.bind_var, m.session},
                                           std::move(after), std::move(v.value().env)};
                        },
                        [&](const SelEta& s) -> StepResult {
                            return Stepped{EvSel{s.from, s.to, s.session, s.label}, n.cont, env};
                        },
                    },
                    n.head);
            },
            [&](const CondNode& n) -> StepResult {
                auto v = eval_expr(n.guard, env, n.at);
                if (!v.ok()) return StepError{v.error(), "if @" + n.at.value};
                if (value_sort(v.value().value) != Sort::Bool)
                    return StepError{{EvalErrorKind::SortMismatch,
                                      "conditional guard evaluated to sort " +
                                          std::string(sort_name(value_sort(v.value().value)))},
                                     "if @" + n.at.value};
                bool b = std::get<bool>(v.value().value);
                return Stepped{EvCond{n.at, b}, b ? n.then_branch : n.else_branch, std::move(v.value().env)};
            },
            [&](const RecNode&) -> StepResult {
                // C|Struct: unfold, then reduce the unfolding
                return step_at(unfold_rec_term(c, avoid), env, avoid);
            },
            [&](const CallNode&) -> StepResult { return Stuck{}; }, // free call: no rule
            [&](const ResNode& n) -> StepResult {
                StepResult inner = step_at(n.body, env, avoid);
                if (auto* s = std::get_if<Stepped>(&inner))
                    return Stepped{std::move(s->event), res(n.session, std::move(s->after)), std::move(s->env)};
                return inner;
            },
            [&](const InactNode&) -> StepResult { return Stuck{}; },
        },
        c->node);
}

} // namespace

StepResult step(const ChorPtr& c, const BuiltinEnv& env) {
    std::set<SessChan> avoid = sessions_mentioned(c);
    return step_at(c, env, avoid);
}

// --------------------------------------------------------------------- run ----

Trace run(const ChorPtr& c, const BuiltinEnv& env, int fuel) {
    Trace t;
    ChorPtr cur = c;
    t.final_env = env;
    for (int i = 0; i < fuel; ++i) {
        StepResult r = step(cur, t.final_env);
        if (std::holds_alternative<Stuck>(r)) return t;
        if (auto* e = std::get_if<StepError>(&r)) {
            t.error = *e;
            return t;
        }
        auto& s = std::get<Stepped>(r);
        if (std::holds_alternative<EvStart>(s.event)) ++t.start_count;
        t.steps.push_back({s.event, s.after});
        cur = std::move(s.after);
        t.final_env = std::move(s.env);
    }
    // out of fuel: report whether more behaviour was pending
    StepResult probe = step(cur, t.final_env);
    t.fuel_exhausted = !std::holds_alternative<Stuck>(probe);
    return t;
}

} // namespace chorm
