#include "chorm/typing.hpp"

#include <sstream>

#include "chorm/printer.hpp"

namespace chorm {

// ---------------------------------------------------------------- sort_of ----

Result<Sort, SortError> sort_of(const ExprPtr& e, const SortEnv& env, const ThreadId& at) {
    using R = Result<Sort, SortError>;
    return std::visit(
        overload{
            [&](const LitExpr& n) -> R { return value_sort(n.value); },
            [&](const VarExpr& n) -> R {
                auto it = env.vars.find({at, n.name});
                if (it == env.vars.end())
                    return SortError{SortErrorKind::Unbound,
                                     "unbound variable " + n.name.value + " at thread " + at.value};
                return it->second;
            },
            [&](const CallExpr& n) -> R {
                auto it = env.sigs.find(n.fn);
                if (it == env.sigs.end())
                    return SortError{SortErrorKind::Unbound, "unknown builtin " + n.fn};
                const Signature& sig = it->second;
                if (sig.args.size() != n.args.size())
                    return SortError{SortErrorKind::Arity,
                                     "builtin " + n.fn + " expects " + std::to_string(sig.args.size()) +
                                         " argument(s), got " + std::to_string(n.args.size())};
                for (size_t i = 0; i < n.args.size(); ++i) {
                    auto s = sort_of(n.args[i], env, at);
                    if (!s.ok()) return s;
                    if (s.value() != sig.args[i])
                        return SortError{SortErrorKind::Mismatch,
                                         "argument " + std::to_string(i + 1) + " of " + n.fn + " has sort " +
                                             sort_name(s.value()) + ", expected " + sort_name(sig.args[i])};
                }
                return sig.ret;
            },
            [&](const BinOpExpr& n) -> R {
                auto l = sort_of(n.lhs, env, at);
                if (!l.ok()) return l;
                auto r = sort_of(n.rhs, env, at);
                if (!r.ok()) return r;
                switch (n.op) {
                case BinOp::Eq:
                    if (l.value() != r.value())
                        return SortError{SortErrorKind::Mismatch,
                                         std::string("== compares ") + sort_name(l.value()) + " against " +
                                             sort_name(r.value())};
                    return Sort::Bool;
                case BinOp::Add:
                    if (l.value() != Sort::Int || r.value() != Sort::Int)
                        return SortError{SortErrorKind::Mismatch, "+ needs int operands"};
                    return Sort::Int;
                case BinOp::Concat:
                    if (l.value() != Sort::String || r.value() != Sort::String)
                        return SortError{SortErrorKind::Mismatch, "++ needs string operands"};
                    return Sort::String;
                }
                return SortError{SortErrorKind::Mismatch, "unknown operator"};
            },
        },
        e->node);
}

// -------------------------------------------------------------- typecheck ----

namespace {

bool residual_done(const TypePtr& g) {
    return std::holds_alternative<EndType>(unfold_head(g)->node);
}

struct Checker {
    const Gamma& gamma;
    std::vector<Diagnostic> errors{};
    std::set<SessChan> completed{};
    std::set<SessChan> poisoned{}; // sessions already reported; no follow-up noise
    std::map<ChorRecVar, Delta> snapshots{};

    void err(const std::string& path, std::string msg) { errors.push_back({path, std::move(msg)}); }

    // Delta comparison for recursion stability: ignore poisoned and finished
    // sessions, then require identical casts and residuals up to unfolding.
    bool stable(const Delta& now, const Delta& snap) {
        auto live = [&](const Delta& d) {
            std::map<SessChan, const SessionState*> out;
            for (const auto& [k, st] : d)
                if (!poisoned.count(k) && !residual_done(st.residual)) out.emplace(k, &st);
            return out;
        };
        auto a = live(now), b = live(snap);
        if (a.size() != b.size()) return false;
        for (const auto& [k, st] : a) {
            auto it = b.find(k);
            if (it == b.end()) return false;
            if (st->cast != it->second->cast) return false;
            if (!type_equal_unfolded(st->residual, it->second->residual)) return false;
        }
        return true;
    }

    void note_progress(const SessChan& k, const TypePtr& residual) {
        if (residual_done(residual)) completed.insert(k);
    }

    void walk(const ChorPtr& c, Delta& delta, SortEnv& sorts, const std::string& path) {
        std::visit(
            overload{
                [&](const SeqNode& n) {
                    std::visit(
                        overload{
                            [&](const StartEta& s) {
                                std::string here = join(path, "start " + s.chan.value + " as " + s.session.value);
                                auto git = gamma.find(s.chan);
                                if (git == gamma.end()) {
                                    err(here, "no protocol bound to public channel " + s.chan.value);
                                    poisoned.insert(s.session);
                                } else {
                                    auto dit = delta.find(s.session);
                                    if (dit != delta.end() && !residual_done(dit->second.residual) &&
                                        !poisoned.count(s.session))
                                        err(here, "session " + s.session.value + " restarted before completion");
                                    std::set<RoleName> want = type_roles(git->second);
                                    std::set<RoleName> got;
                                    std::map<RoleName, ThreadId> cast;
                                    for (const auto& p : s.participants) {
                                        got.insert(p.role);
                                        cast.emplace(p.role, p.thread);
                                    }
                                    if (got != want) {
                                        err(here, "start roles do not match protocol " + s.chan.value +
                                                      " role set exactly");
                                        poisoned.insert(s.session);
                                    } else {
                                        delta[s.session] = SessionState{git->second, std::move(cast)};
                                        poisoned.erase(s.session);
                                        note_progress(s.session, git->second);
                                    }
                                }
                                walk(n.cont, delta, sorts, path);
                            },
                            [&](const ComEta& m) {
                                std::string here =
                                    join(path, "com " + m.sender.thread.value + "->" + m.receiver.thread.value +
                                                   " over " + m.session.value);
                                advance_com(m, delta, sorts, here);
                                walk(n.cont, delta, sorts, path);
                            },
                            [&](const SelEta& s) {
                                std::string here =
                                    join(path, "sel " + s.from.thread.value + "->" + s.to.thread.value + " over " +
                                                   s.session.value);
                                advance_sel(s, delta, here);
                                walk(n.cont, delta, sorts, path);
                            },
                        },
                        n.head);
                },
                [&](const CondNode& n) {
                    std::string here = join(path, "if @" + n.at.value);
                    auto g = sort_of(n.guard, sorts, n.at);
                    if (!g.ok())
                        err(here, g.error().message);
                    else if (g.value() != Sort::Bool)
                        err(here, std::string("conditional guard has sort ") + sort_name(g.value()) +
                                      ", expected bool");
                    Delta d2 = delta;
                    SortEnv s2 = sorts;
                    walk(n.then_branch, delta, sorts, join(here, "then"));
                    walk(n.else_branch, d2, s2, join(here, "else"));
                },
                [&](const RecNode& n) {
                    std::string here = join(path, "rec " + n.var.value);
                    auto saved = snapshots.find(n.var);
                    std::optional<Delta> prev;
                    if (saved != snapshots.end()) prev = saved->second;
                    snapshots[n.var] = delta;
                    walk(n.body, delta, sorts, here);
                    if (prev)
                        snapshots[n.var] = *prev;
                    else
                        snapshots.erase(n.var);
                },
                [&](const CallNode& n) {
                    std::string here = join(path, n.var.value);
                    auto it = snapshots.find(n.var);
                    if (it == snapshots.end()) {
                        err(here, "call of unbound recursion variable " + n.var.value);
                        return;
                    }
                    if (!stable(delta, it->second))
                        err(here, "non-stable recursion: sessions at " + n.var.value +
                                      " differ from its rec binder");
                },
                [&](const ResNode& n) {
                    std::string here = join(path, "(new " + n.session.value + ")");
                    if (!delta.count(n.session) && !poisoned.count(n.session)) {
                        err(here, "restricted session " + n.session.value + " is not in the typing environment");
                        poisoned.insert(n.session);
                    }
                    walk(n.body, delta, sorts, path);
                },
                [&](const InactNode&) {
                    for (const auto& [k, st] : delta) {
                        if (poisoned.count(k)) continue;
                        if (!residual_done(st.residual))
                            err(path.empty() ? "0" : path, "session " + k.value + " incomplete: expected " +
                                                               pretty(unfold_head(st.residual)));
                        else
                            completed.insert(k);
                    }
                },
            },
            c->node);
    }

    void advance_com(const ComEta& m, Delta& delta, SortEnv& sorts, const std::string& here) {
        if (poisoned.count(m.session)) return;
        auto it = delta.find(m.session);
        if (it == delta.end()) {
            err(here, "communication on unknown session " + m.session.value);
            poisoned.insert(m.session);
            return;
        }
        SessionState& st = it->second;
        TypePtr head = unfold_head(st.residual);
        auto* tc = std::get_if<ComType>(&head->node);
        if (!tc) {
            err(here, "protocol-order mismatch: session " + m.session.value + " expects " + pretty(head) +
                          ", found a value communication");
            poisoned.insert(m.session);
            return;
        }
        bool roles_ok = true;
        if (m.sender.role != tc->from || m.receiver.role != tc->to) {
            err(here, "role mismatch: protocol step is " + tc->from.value + "->" + tc->to.value +
                          ", interaction is " + m.sender.role.value + "->" + m.receiver.role.value);
            roles_ok = false;
        }
        if (roles_ok) {
            auto cf = st.cast.find(tc->from);
            auto ct = st.cast.find(tc->to);
            if (cf == st.cast.end() || cf->second != m.sender.thread)
                err(here, "role " + tc->from.value + " is not played by thread " + m.sender.thread.value), roles_ok = false;
            else if (ct == st.cast.end() || ct->second != m.receiver.thread)
                err(here, "role " + tc->to.value + " is not played by thread " + m.receiver.thread.value), roles_ok = false;
        }
        auto s = sort_of(m.expr, sorts, m.sender.thread);
        if (!s.ok())
            err(here, s.error().message);
        else if (s.value() != tc->sort)
            err(here, std::string("sort mismatch: expected ") + sort_name(tc->sort) + ", sent " +
                          sort_name(s.value()));
        sorts.vars[{m.receiver.thread, m.bind_var}] = tc->sort;
        st.residual = tc->cont;
        note_progress(m.session, st.residual);
        if (!roles_ok) poisoned.insert(m.session);
    }

    void advance_sel(const SelEta& s, Delta& delta, const std::string& here) {
        if (poisoned.count(s.session)) return;
        auto it = delta.find(s.session);
        if (it == delta.end()) {
            err(here, "selection on unknown session " + s.session.value);
            poisoned.insert(s.session);
            return;
        }
        SessionState& st = it->second;
        TypePtr head = unfold_head(st.residual);
        auto* ch = std::get_if<ChoiceType>(&head->node);
        if (!ch) {
            err(here, "protocol-order mismatch: session " + s.session.value + " expects " + pretty(head) +
                          ", found a branch selection");
            poisoned.insert(s.session);
            return;
        }
        bool ok = true;
        if (s.from.role != ch->from || s.to.role != ch->to) {
            err(here, "role mismatch: protocol branch is " + ch->from.value + "->" + ch->to.value +
                          ", selection is " + s.from.role.value + "->" + s.to.role.value);
            ok = false;
        } else {
            auto cf = st.cast.find(ch->from);
            auto ct = st.cast.find(ch->to);
            if (cf == st.cast.end() || cf->second != s.from.thread)
                err(here, "role " + ch->from.value + " is not played by thread " + s.from.thread.value), ok = false;
            else if (ct == st.cast.end() || ct->second != s.to.thread)
                err(here, "role " + ch->to.value + " is not played by thread " + s.to.thread.value), ok = false;
        }
        auto br = ch->branches.find(s.label);
        if (br == ch->branches.end()) {
            err(here, "missing label: " + s.label.value + " is not offered here");
            poisoned.insert(s.session);
            return;
        }
        st.residual = br->second;
        note_progress(s.session, st.residual);
        if (!ok) poisoned.insert(s.session);
    }

    static std::string join(const std::string& a, const std::string& b) {
        return a.empty() ? b : a + " > " + b;
    }
};

} // namespace

TypeReport typecheck(const Gamma& gamma, const ChorPtr& c, Delta delta, SortEnv sorts) {
    Checker ck{gamma};
    ck.walk(c, delta, sorts, "");
    TypeReport rep;
    rep.errors = std::move(ck.errors);
    rep.ok = rep.errors.empty();
    rep.completed_sessions = std::move(ck.completed);
    return rep;
}

Result<Gamma, std::string> auto_bind(const ChorPtr& c,
                                     const std::map<std::string, TypePtr>& protocols,
                                     const std::vector<std::string>& binds) {
    Gamma gamma;
    std::set<std::string> used;
    for (const auto& spec : binds) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            return std::string("malformed bind (expected CHANNEL=PROTOCOL): ") + spec;
        std::string chan = spec.substr(0, eq);
        std::string proto = spec.substr(eq + 1);
        auto it = protocols.find(proto);
        if (it == protocols.end())
            return std::string("unknown protocol in bind: ") + proto;
        gamma[PublicChan{chan}] = it->second;
        used.insert(proto);
    }

    std::vector<PublicChan> leftover;
    for (const auto& ch : public_channels(c)) {
        if (gamma.count(ch)) continue;
        auto it = protocols.find(ch.value);
        if (it != protocols.end() && !used.count(ch.value)) {
            gamma[ch] = it->second;
            used.insert(ch.value);
        } else {
            leftover.push_back(ch);
        }
    }

    std::vector<std::string> free_protocols;
    for (const auto& [name, g] : protocols)
        if (!used.count(name)) free_protocols.push_back(name);

    if (leftover.empty()) return gamma;
    if (leftover.size() == free_protocols.size()) {
        for (std::size_t i = 0; i < leftover.size(); ++i)
            gamma[leftover[i]] = protocols.at(free_protocols[i]);
        return gamma;
    }
    std::ostringstream ss;
    ss << "cannot pair public channels with protocols (" << leftover.size()
       << " unbound channel(s), " << free_protocols.size()
       << " unused protocol(s)); bind them explicitly";
    return ss.str();
}

} // namespace chorm
