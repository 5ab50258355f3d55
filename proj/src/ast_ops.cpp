#include "chorm/ast_ops.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace chorm {

// ------------------------------------------------------ structural equality

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overload{
            [&](const LitExpr& x) { return x.value == std::get<LitExpr>(b->node).value; },
            [&](const VarExpr& x) { return x.name == std::get<VarExpr>(b->node).name; },
            [&](const CallExpr& x) {
                const auto& y = std::get<CallExpr>(b->node);
                if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
                for (size_t i = 0; i < x.args.size(); ++i)
                    if (!expr_equal(x.args[i], y.args[i])) return false;
                return true;
            },
            [&](const BinOpExpr& x) {
                const auto& y = std::get<BinOpExpr>(b->node);
                return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
            },
        },
        a->node);
}

bool eta_equal(const Eta& a, const Eta& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        overload{
            [&](const StartEta& x) {
                const auto& y = std::get<StartEta>(b);
                return x.participants == y.participants && x.chan == y.chan && x.session == y.session;
            },
            [&](const ComEta& x) {
                const auto& y = std::get<ComEta>(b);
                return x.sender == y.sender && expr_equal(x.expr, y.expr) && x.receiver == y.receiver &&
                       x.bind_var == y.bind_var && x.session == y.session;
            },
            [&](const SelEta& x) {
                const auto& y = std::get<SelEta>(b);
                return x.from == y.from && x.to == y.to && x.session == y.session && x.label == y.label;
            },
        },
        a);
}

bool chor_equal(const ChorPtr& a, const ChorPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overload{
            [&](const SeqNode& x) {
                const auto& y = std::get<SeqNode>(b->node);
                return eta_equal(x.head, y.head) && chor_equal(x.cont, y.cont);
            },
            [&](const CondNode& x) {
                const auto& y = std::get<CondNode>(b->node);
                return x.at == y.at && expr_equal(x.guard, y.guard) &&
                       chor_equal(x.then_branch, y.then_branch) && chor_equal(x.else_branch, y.else_branch);
            },
            [&](const RecNode& x) {
                const auto& y = std::get<RecNode>(b->node);
                return x.var == y.var && chor_equal(x.body, y.body);
            },
            [&](const CallNode& x) { return x.var == std::get<CallNode>(b->node).var; },
            [&](const ResNode& x) {
                const auto& y = std::get<ResNode>(b->node);
                return x.session == y.session && chor_equal(x.body, y.body);
            },
            [&](const InactNode&) { return true; },
        },
        a->node);
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overload{
            [&](const ComType& x) {
                const auto& y = std::get<ComType>(b->node);
                return x.from == y.from && x.to == y.to && x.sort == y.sort && type_equal(x.cont, y.cont);
            },
            [&](const ChoiceType& x) {
                const auto& y = std::get<ChoiceType>(b->node);
                if (x.from != y.from || x.to != y.to || x.branches.size() != y.branches.size()) return false;
                auto it = y.branches.begin();
                for (const auto& [l, g] : x.branches) {
                    if (l != it->first || !type_equal(g, it->second)) return false;
                    ++it;
                }
                return true;
            },
            [&](const EndType&) { return true; },
            [&](const RecType& x) {
                const auto& y = std::get<RecType>(b->node);
                return x.var == y.var && type_equal(x.body, y.body);
            },
            [&](const TypeVar& x) { return x.var == std::get<TypeVar>(b->node).var; },
        },
        a->node);
}

// --------------------------------------------------------------- queries ----

namespace {

std::string eta_breadcrumb(const Eta& e) {
    return std::visit(overload{
                          [](const StartEta& s) { return "start " + s.chan.value + " as " + s.session.value; },
                          [](const ComEta& c) {
                              return "com " + c.sender.thread.value + "->" + c.receiver.thread.value + " over " +
                                     c.session.value;
                          },
                          [](const SelEta& s) {
                              return "sel " + s.from.thread.value + "->" + s.to.thread.value + " over " +
                                     s.session.value;
                          },
                      },
                      e);
}

std::string join_path(const std::vector<std::string>& segs) {
    if (segs.empty()) return "(root)";
    std::string out;
    for (size_t i = 0; i < segs.size(); ++i) {
        if (i) out += " > ";
        out += segs[i];
    }
    return out;
}

struct WfState {
    std::vector<Diagnostic>& diags;
    std::set<SessChan> started; // sessions already claimed by some start, global
};

void wf_walk(const ChorPtr& c, std::vector<std::string>& path, std::set<SessChan> bound,
             std::map<ChorRecVar, bool> rec_guarded, WfState& st) {
    std::visit(
        overload{
            [&](const SeqNode& n) {
                path.push_back(eta_breadcrumb(n.head));
                std::visit(
                    overload{
                        [&](const StartEta& s) {
                            if (s.participants.size() < 2)
                                st.diags.push_back({join_path(path), "start needs at least two participants"});
                            for (size_t i = 0; i < s.participants.size(); ++i)
                                for (size_t j = i + 1; j < s.participants.size(); ++j) {
                                    if (s.participants[i].thread == s.participants[j].thread)
                                        st.diags.push_back({join_path(path),
                                                            "duplicate start participant thread " +
                                                                s.participants[i].thread.value});
                                    if (s.participants[i].role == s.participants[j].role)
                                        st.diags.push_back({join_path(path),
                                                            "duplicate start participant role " +
                                                                s.participants[i].role.value});
                                }
                            if (bound.count(s.session))
                                st.diags.push_back({join_path(path),
                                                    "start on session " + s.session.value +
                                                        " already bound by an enclosing binder"});
                            if (!st.started.insert(s.session).second)
                                st.diags.push_back({join_path(path),
                                                    "duplicate start on session " + s.session.value});
                            bound.insert(s.session);
                        },
                        [&](const ComEta& m) {
                            if (m.sender.thread == m.receiver.thread)
                                st.diags.push_back({join_path(path),
                                                    "com endpoints share thread " + m.sender.thread.value});
                        },
                        [&](const SelEta& s) {
                            if (s.from.thread == s.to.thread)
                                st.diags.push_back({join_path(path),
                                                    "sel endpoints share thread " + s.from.thread.value});
                        },
                    },
                    n.head);
                for (auto& [x, g] : rec_guarded) g = true; // any eta guards every open rec
                wf_walk(n.cont, path, bound, rec_guarded, st);
                path.pop_back();
            },
            [&](const CondNode& n) {
                for (auto& [x, g] : rec_guarded) g = true; // a conditional also guards
                path.push_back("if @" + n.at.value);
                path.push_back("then");
                wf_walk(n.then_branch, path, bound, rec_guarded, st);
                path.pop_back();
                path.push_back("else");
                wf_walk(n.else_branch, path, bound, rec_guarded, st);
                path.pop_back();
                path.pop_back();
            },
            [&](const RecNode& n) {
                path.push_back("rec " + n.var.value);
                rec_guarded[n.var] = false;
                wf_walk(n.body, path, bound, rec_guarded, st);
                path.pop_back();
            },
            [&](const CallNode& n) {
                path.push_back(n.var.value);
                auto it = rec_guarded.find(n.var);
                if (it == rec_guarded.end())
                    st.diags.push_back({join_path(path), "unbound recursion variable " + n.var.value});
                else if (!it->second)
                    st.diags.push_back({join_path(path), "unguarded recursion through " + n.var.value});
                path.pop_back();
            },
            [&](const ResNode& n) {
                path.push_back("(new " + n.session.value + ")");
                bound.insert(n.session);
                wf_walk(n.body, path, bound, rec_guarded, st);
                path.pop_back();
            },
            [&](const InactNode&) {},
        },
        c->node);
}

} // namespace

std::vector<Diagnostic> well_formed(const ChorPtr& c) {
    std::vector<Diagnostic> diags;
    WfState st{diags, {}};
    std::vector<std::string> path;
    wf_walk(c, path, {}, {}, st);
    return diags;
}

namespace {

void free_sessions_walk(const ChorPtr& c, std::set<SessChan> bound, std::set<SessChan>& out) {
    std::visit(overload{
                   [&](const SeqNode& n) {
                       std::visit(overload{
                                      [&](const StartEta& s) { bound.insert(s.session); },
                                      [&](const ComEta& m) {
                                          if (!bound.count(m.session)) out.insert(m.session);
                                      },
                                      [&](const SelEta& s) {
                                          if (!bound.count(s.session)) out.insert(s.session);
                                      },
                                  },
                                  n.head);
                       free_sessions_walk(n.cont, bound, out);
                   },
                   [&](const CondNode& n) {
                       free_sessions_walk(n.then_branch, bound, out);
                       free_sessions_walk(n.else_branch, bound, out);
                   },
                   [&](const RecNode& n) { free_sessions_walk(n.body, bound, out); },
                   [&](const CallNode&) {},
                   [&](const ResNode& n) {
                       bound.insert(n.session);
                       free_sessions_walk(n.body, bound, out);
                   },
                   [&](const InactNode&) {},
               },
               c->node);
}

} // namespace

std::set<SessChan> free_sessions(const ChorPtr& c) {
    std::set<SessChan> out;
    free_sessions_walk(c, {}, out);
    return out;
}

std::set<SessChan> sessions_mentioned(const ChorPtr& c) {
    std::set<SessChan> out;
    std::function<void(const ChorPtr&)> walk = [&](const ChorPtr& t) {
        std::visit(overload{
                       [&](const SeqNode& n) {
                           std::visit(overload{
                                          [&](const StartEta& s) { out.insert(s.session); },
                                          [&](const ComEta& m) { out.insert(m.session); },
                                          [&](const SelEta& s) { out.insert(s.session); },
                                      },
                                      n.head);
                           walk(n.cont);
                       },
                       [&](const CondNode& n) {
                           walk(n.then_branch);
                           walk(n.else_branch);
                       },
                       [&](const RecNode& n) { walk(n.body); },
                       [&](const CallNode&) {},
                       [&](const ResNode& n) {
                           out.insert(n.session);
                           walk(n.body);
                       },
                       [&](const InactNode&) {},
                   },
                   t->node);
    };
    walk(c);
    return out;
}

std::vector<PublicChan> public_channels(const ChorPtr& c) {
    std::vector<PublicChan> out;
    std::function<void(const ChorPtr&)> walk = [&](const ChorPtr& t) {
        std::visit(overload{
                       [&](const SeqNode& n) {
                           if (auto* s = std::get_if<StartEta>(&n.head)) {
                               if (std::find(out.begin(), out.end(), s->chan) ==
                                   out.end())
                                   out.push_back(s->chan);
                           }
                           walk(n.cont);
                       },
                       [&](const CondNode& n) {
                           walk(n.then_branch);
                           walk(n.else_branch);
                       },
                       [&](const RecNode& n) { walk(n.body); },
                       [&](const CallNode&) {},
                       [&](const ResNode& n) { walk(n.body); },
                       [&](const InactNode&) {},
                   },
                   t->node);
    };
    walk(c);
    return out;
}

int node_count(const ChorPtr& c) {
    return std::visit(overload{
                          [&](const SeqNode& n) { return 1 + node_count(n.cont); },
                          [&](const CondNode& n) {
                              return 1 + node_count(n.then_branch) + node_count(n.else_branch);
                          },
                          [&](const RecNode& n) { return 1 + node_count(n.body); },
                          [&](const CallNode&) { return 1; },
                          [&](const ResNode& n) { return 1 + node_count(n.body); },
                          [&](const InactNode&) { return 1; },
                      },
                      c->node);
}

// -------------------------------------------------------------- substitute

ExprPtr substitute_expr(const ExprPtr& e, const VarName& x, const Value& v) {
    return std::visit(
        overload{
            [&](const LitExpr&) { return e; },
            [&](const VarExpr& n) { return n.name == x ? lit(v) : e; },
            [&](const CallExpr& n) {
                std::vector<ExprPtr> args;
                args.reserve(n.args.size());
                bool changed = false;
                for (const auto& a : n.args) {
                    args.push_back(substitute_expr(a, x, v));
                    changed = changed || args.back() != a;
                }
                return changed ? call(n.fn, std::move(args)) : e;
            },
            [&](const BinOpExpr& n) {
                auto l = substitute_expr(n.lhs, x, v);
                auto r = substitute_expr(n.rhs, x, v);
                return (l == n.lhs && r == n.rhs) ? e : binop(n.op, std::move(l), std::move(r));
            },
        },
        e->node);
}

ChorPtr substitute(const ChorPtr& c, const VarName& x, const Value& v) {
    return std::visit(
        overload{
            [&](const SeqNode& n) {
                return std::visit(
                    overload{
                        [&](const StartEta&) { return seq(n.head, substitute(n.cont, x, v)); },
                        [&](const ComEta& m) {
                            ComEta m2 = m;
                            m2.expr = substitute_expr(m.expr, x, v);
                            // the received variable shields the continuation
                            ChorPtr cont = m.bind_var == x ? n.cont : substitute(n.cont, x, v);
                            return seq(Eta{m2}, std::move(cont));
                        },
                        [&](const SelEta&) { return seq(n.head, substitute(n.cont, x, v)); },
                    },
                    n.head);
            },
            [&](const CondNode& n) {
                return cond(n.at, substitute_expr(n.guard, x, v), substitute(n.then_branch, x, v),
                            substitute(n.else_branch, x, v));
            },
            [&](const RecNode& n) { return rec(n.var, substitute(n.body, x, v)); },
            [&](const CallNode&) { return c; },
            [&](const ResNode& n) { return res(n.session, substitute(n.body, x, v)); },
            [&](const InactNode&) { return c; },
        },
        c->node);
}

// ---------------------------------------------------------------- binders ----

SessChan fresh_session(const SessChan& base, std::set<SessChan>& avoid) {
    // strip a trailing _<digits> so repeated freshening stays short: k_3 -> k
    std::string stem = base.value;
    auto us = stem.rfind('_');
    if (us != std::string::npos && us + 1 < stem.size() &&
        stem.find_first_not_of("0123456789", us + 1) == std::string::npos)
        stem = stem.substr(0, us);
    for (int n = 1;; ++n) {
        SessChan cand{stem + "_" + std::to_string(n)};
        if (avoid.insert(cand).second) return cand;
    }
}

namespace {

// Rename free occurrences of session `from` to `to`; stops below re-binders
// of `from`. `to` must be fresh for the subtree.
ChorPtr rename_free_session(const ChorPtr& c, const SessChan& from, const SessChan& to) {
    auto ren = [&](const SessChan& k) { return k == from ? to : k; };
    return std::visit(
        overload{
            [&](const SeqNode& n) {
                return std::visit(
                    overload{
                        [&](const StartEta& s) {
                            StartEta s2 = s; // the start session is a binder, not a use
                            if (s.session == from) return seq(Eta{s2}, n.cont);
                            return seq(Eta{s2}, rename_free_session(n.cont, from, to));
                        },
                        [&](const ComEta& m) {
                            ComEta m2 = m;
                            m2.session = ren(m.session);
                            return seq(Eta{m2}, rename_free_session(n.cont, from, to));
                        },
                        [&](const SelEta& s) {
                            SelEta s2 = s;
                            s2.session = ren(s.session);
                            return seq(Eta{s2}, rename_free_session(n.cont, from, to));
                        },
                    },
                    n.head);
            },
            [&](const CondNode& n) {
                return cond(n.at, n.guard, rename_free_session(n.then_branch, from, to),
                            rename_free_session(n.else_branch, from, to));
            },
            [&](const RecNode& n) { return rec(n.var, rename_free_session(n.body, from, to)); },
            [&](const CallNode&) { return c; },
            [&](const ResNode& n) {
                if (n.session == from) return c; // shadowed
                return res(n.session, rename_free_session(n.body, from, to));
            },
            [&](const InactNode&) { return c; },
        },
        c->node);
}

} // namespace

ChorPtr freshen_bound_sessions(const ChorPtr& c, std::set<SessChan>& avoid) {
    return std::visit(
        overload{
            [&](const SeqNode& n) {
                if (const auto* s = std::get_if<StartEta>(&n.head)) {
                    SessChan nk = fresh_session(s->session, avoid);
                    StartEta s2 = *s;
                    s2.session = nk;
                    ChorPtr cont = rename_free_session(n.cont, s->session, nk);
                    return seq(Eta{s2}, freshen_bound_sessions(cont, avoid));
                }
                return seq(n.head, freshen_bound_sessions(n.cont, avoid));
            },
            [&](const CondNode& n) {
                return cond(n.at, n.guard, freshen_bound_sessions(n.then_branch, avoid),
                            freshen_bound_sessions(n.else_branch, avoid));
            },
            [&](const RecNode& n) { return rec(n.var, freshen_bound_sessions(n.body, avoid)); },
            [&](const CallNode&) { return c; },
            [&](const ResNode& n) {
                SessChan nk = fresh_session(n.session, avoid);
                ChorPtr body = rename_free_session(n.body, n.session, nk);
                return res(nk, freshen_bound_sessions(body, avoid));
            },
            [&](const InactNode&) { return c; },
        },
        c->node);
}

ChorPtr substitute_call(const ChorPtr& body, const ChorRecVar& x, const ChorPtr& r,
                        std::set<SessChan>& fresh_avoid) {
    const std::set<SessChan> r_free = free_sessions(r);
    std::function<ChorPtr(const ChorPtr&)> walk = [&](const ChorPtr& c) -> ChorPtr {
        return std::visit(
            overload{
                [&](const SeqNode& n) -> ChorPtr {
                    if (const auto* s = std::get_if<StartEta>(&n.head)) {
                        if (r_free.count(s->session)) {
                            // the spliced copy's free session would be captured
                            SessChan nk = fresh_session(s->session, fresh_avoid);
                            StartEta s2 = *s;
                            s2.session = nk;
                            return seq(Eta{s2}, walk(rename_free_session(n.cont, s->session, nk)));
                        }
                    }
                    return seq(n.head, walk(n.cont));
                },
                [&](const CondNode& n) -> ChorPtr {
                    return cond(n.at, n.guard, walk(n.then_branch), walk(n.else_branch));
                },
                [&](const RecNode& n) -> ChorPtr {
                    if (n.var == x) return c; // shadowed: r not substituted below
                    return rec(n.var, walk(n.body));
                },
                [&](const CallNode& n) -> ChorPtr {
                    if (n.var != x) return rec_call(n.var);
                    // one fresh batch of bound session names per spliced copy
                    return freshen_bound_sessions(r, fresh_avoid);
                },
                [&](const ResNode& n) -> ChorPtr {
                    if (r_free.count(n.session)) {
                        SessChan nk = fresh_session(n.session, fresh_avoid);
                        return res(nk, walk(rename_free_session(n.body, n.session, nk)));
                    }
                    return res(n.session, walk(n.body));
                },
                [&](const InactNode&) { return inact(); },
            },
            c->node);
    };
    return walk(body);
}

// ------------------------------------------------------------------ alpha ----

namespace {

struct CanonCounters {
    int vars = 0;
    int sessions = 0;
    int recs = 0;
};

using VarMap = std::map<VarName, VarName>;
using SessMap = std::map<SessChan, SessChan>;
using RecMap = std::map<ChorRecVar, ChorRecVar>;

ExprPtr canon_expr(const ExprPtr& e, const VarMap& vm) {
    return std::visit(overload{
                          [&](const LitExpr&) { return e; },
                          [&](const VarExpr& n) {
                              auto it = vm.find(n.name);
                              return it == vm.end() ? e : var(it->second);
                          },
                          [&](const CallExpr& n) {
                              std::vector<ExprPtr> args;
                              for (const auto& a : n.args) args.push_back(canon_expr(a, vm));
                              return call(n.fn, std::move(args));
                          },
                          [&](const BinOpExpr& n) {
                              return binop(n.op, canon_expr(n.lhs, vm), canon_expr(n.rhs, vm));
                          },
                      },
                      e->node);
}

// Pre-order position of the first free use of each session in `targets`.
void first_use_scan(const ChorPtr& c, const std::set<SessChan>& targets, std::set<SessChan> shadow,
                    int& pos, std::map<SessChan, int>& found) {
    auto use = [&](const SessChan& k) {
        if (targets.count(k) && !shadow.count(k) && !found.count(k)) found[k] = pos;
    };
    ++pos;
    std::visit(overload{
                   [&](const SeqNode& n) {
                       std::visit(overload{
                                      [&](const StartEta& s) { shadow.insert(s.session); },
                                      [&](const ComEta& m) { use(m.session); },
                                      [&](const SelEta& s) { use(s.session); },
                                  },
                                  n.head);
                       first_use_scan(n.cont, targets, shadow, pos, found);
                   },
                   [&](const CondNode& n) {
                       first_use_scan(n.then_branch, targets, shadow, pos, found);
                       first_use_scan(n.else_branch, targets, shadow, pos, found);
                   },
                   [&](const RecNode& n) { first_use_scan(n.body, targets, shadow, pos, found); },
                   [&](const CallNode&) {},
                   [&](const ResNode& n) {
                       shadow.insert(n.session);
                       first_use_scan(n.body, targets, shadow, pos, found);
                   },
                   [&](const InactNode&) {},
               },
               c->node);
}

ChorPtr canon_chor(const ChorPtr& c, VarMap vm, SessMap sm, RecMap rm, CanonCounters& ct,
                   bool sort_start) {
    return std::visit(
        overload{
            [&](const SeqNode& n) -> ChorPtr {
                return std::visit(
                    overload{
                        [&](const StartEta& s) -> ChorPtr {
                            StartEta s2 = s;
                            if (sort_start) std::sort(s2.participants.begin(), s2.participants.end());
                            SessChan nk{"$s" + std::to_string(ct.sessions++)};
                            s2.session = nk;
                            sm[s.session] = nk;
                            return seq(Eta{s2}, canon_chor(n.cont, vm, sm, rm, ct, sort_start));
                        },
                        [&](const ComEta& m) -> ChorPtr {
                            ComEta m2 = m;
                            m2.expr = canon_expr(m.expr, vm);
                            if (auto it = sm.find(m.session); it != sm.end()) m2.session = it->second;
                            VarName nx{"$v" + std::to_string(ct.vars++)};
                            m2.bind_var = nx;
                            vm[m.bind_var] = nx;
                            return seq(Eta{m2}, canon_chor(n.cont, vm, sm, rm, ct, sort_start));
                        },
                        [&](const SelEta& s) -> ChorPtr {
                            SelEta s2 = s;
                            if (auto it = sm.find(s.session); it != sm.end()) s2.session = it->second;
                            return seq(Eta{s2}, canon_chor(n.cont, vm, sm, rm, ct, sort_start));
                        },
                    },
                    n.head);
            },
            [&](const CondNode& n) -> ChorPtr {
                ExprPtr g = canon_expr(n.guard, vm);
                ChorPtr t = canon_chor(n.then_branch, vm, sm, rm, ct, sort_start);
                ChorPtr e = canon_chor(n.else_branch, vm, sm, rm, ct, sort_start);
                return cond(n.at, std::move(g), std::move(t), std::move(e));
            },
            [&](const RecNode& n) -> ChorPtr {
                ChorRecVar nx{"$r" + std::to_string(ct.recs++)};
                rm[n.var] = nx;
                return rec(nx, canon_chor(n.body, vm, sm, rm, ct, sort_start));
            },
            [&](const CallNode& n) -> ChorPtr {
                auto it = rm.find(n.var);
                return it == rm.end() ? c : rec_call(it->second);
            },
            [&](const ResNode&) -> ChorPtr {
                // collect the maximal run of adjacent binders
                std::vector<SessChan> run;
                ChorPtr body = c;
                while (const auto* rn = std::get_if<ResNode>(&body->node)) {
                    run.push_back(rn->session);
                    body = rn->body;
                }
                // an inner binder of the same name makes the outer one dead
                std::set<SessChan> claimed;
                std::vector<int> use_pos(run.size(), -1); // -1: dead or unused
                std::set<SessChan> live;
                for (int i = static_cast<int>(run.size()) - 1; i >= 0; --i)
                    if (claimed.insert(run[i]).second) live.insert(run[i]);
                std::map<SessChan, int> found;
                int pos = 0;
                first_use_scan(body, live, {}, pos, found);
                claimed.clear();
                for (int i = static_cast<int>(run.size()) - 1; i >= 0; --i)
                    if (claimed.insert(run[i]).second)
                        if (auto it = found.find(run[i]); it != found.end()) use_pos[i] = it->second;
                // order binders by first use; unused keep their relative order
                std::vector<int> order(run.size());
                for (size_t i = 0; i < run.size(); ++i) order[i] = static_cast<int>(i);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    int ua = use_pos[a] < 0 ? INT32_MAX : use_pos[a];
                    int ub = use_pos[b] < 0 ? INT32_MAX : use_pos[b];
                    return ua < ub;
                });
                std::vector<SessChan> canon_names(run.size());
                for (int idx : order) canon_names[idx] = SessChan{"$s" + std::to_string(ct.sessions++)};
                for (size_t i = 0; i < run.size(); ++i) sm[run[i]] = canon_names[i]; // inner overwrites
                ChorPtr cb = canon_chor(body, vm, sm, rm, ct, sort_start);
                if (std::holds_alternative<InactNode>(cb->node)) return inact(); // (nu k) 0 == 0
                for (auto it = order.rbegin(); it != order.rend(); ++it)
                    cb = res(canon_names[*it], std::move(cb));
                return cb;
            },
            [&](const InactNode&) { return c; },
        },
        c->node);
}

} // namespace

ChorPtr alpha_canonical(const ChorPtr& c, bool sort_start_participants) {
    CanonCounters ct;
    return canon_chor(c, {}, {}, {}, ct, sort_start_participants);
}

bool alpha_equal(const ChorPtr& a, const ChorPtr& b) {
    return chor_equal(alpha_canonical(a), alpha_canonical(b));
}

bool alpha_equal_start_insensitive(const ChorPtr& a, const ChorPtr& b) {
    return chor_equal(alpha_canonical(a, true), alpha_canonical(b, true));
}

namespace {

TypePtr canon_type(const TypePtr& g, std::map<TypeRecVar, TypeRecVar> tm, int& n) {
    return std::visit(
        overload{
            [&](const ComType& t) { return tcom(t.from, t.to, t.sort, canon_type(t.cont, tm, n)); },
            [&](const ChoiceType& t) {
                std::map<Label, TypePtr> bs;
                for (const auto& [l, b] : t.branches) bs[l] = canon_type(b, tm, n);
                return tchoice(t.from, t.to, std::move(bs));
            },
            [&](const EndType&) { return g; },
            [&](const RecType& t) {
                TypeRecVar nx{"$t" + std::to_string(n++)};
                tm[t.var] = nx;
                return trec(nx, canon_type(t.body, tm, n));
            },
            [&](const TypeVar& t) {
                auto it = tm.find(t.var);
                return it == tm.end() ? g : tvar(it->second);
            },
        },
        g->node);
}

} // namespace

TypePtr alpha_canonical_type(const TypePtr& g) {
    int n = 0;
    return canon_type(g, {}, n);
}

bool alpha_equal_type(const TypePtr& a, const TypePtr& b) {
    return type_equal(alpha_canonical_type(a), alpha_canonical_type(b));
}

// ------------------------------------------------------------ type utils ----

std::set<RoleName> type_roles(const TypePtr& g) {
    std::set<RoleName> out;
    std::function<void(const TypePtr&)> walk = [&](const TypePtr& t) {
        std::visit(overload{
                       [&](const ComType& n) {
                           out.insert(n.from);
                           out.insert(n.to);
                           walk(n.cont);
                       },
                       [&](const ChoiceType& n) {
                           out.insert(n.from);
                           out.insert(n.to);
                           for (const auto& [l, b] : n.branches) walk(b);
                       },
                       [&](const EndType&) {},
                       [&](const RecType& n) { walk(n.body); },
                       [&](const TypeVar&) {},
                   },
                   t->node);
    };
    walk(g);
    return out;
}

namespace {

void free_tvars_walk(const TypePtr& g, std::set<TypeRecVar> bound, std::set<TypeRecVar>& out) {
    std::visit(overload{
                   [&](const ComType& n) { free_tvars_walk(n.cont, bound, out); },
                   [&](const ChoiceType& n) {
                       for (const auto& [l, b] : n.branches) free_tvars_walk(b, bound, out);
                   },
                   [&](const EndType&) {},
                   [&](const RecType& n) {
                       bound.insert(n.var);
                       free_tvars_walk(n.body, bound, out);
                   },
                   [&](const TypeVar& n) {
                       if (!bound.count(n.var)) out.insert(n.var);
                   },
               },
               g->node);
}

bool reaches_var_unguarded(const TypePtr& g, const TypeRecVar& t) {
    return std::visit(overload{
                          [&](const ComType&) { return false; },
                          [&](const ChoiceType&) { return false; },
                          [&](const EndType&) { return false; },
                          [&](const RecType& n) {
                              if (n.var == t) return false; // shadowed
                              return reaches_var_unguarded(n.body, t);
                          },
                          [&](const TypeVar& n) { return n.var == t; },
                      },
                      g->node);
}

} // namespace

bool type_closed(const TypePtr& g) {
    std::set<TypeRecVar> free;
    free_tvars_walk(g, {}, free);
    return free.empty();
}

bool type_contractive(const TypePtr& g) {
    return std::visit(overload{
                          [&](const ComType& n) { return type_contractive(n.cont); },
                          [&](const ChoiceType& n) {
                              for (const auto& [l, b] : n.branches)
                                  if (!type_contractive(b)) return false;
                              return true;
                          },
                          [&](const EndType&) { return true; },
                          [&](const RecType& n) {
                              return !reaches_var_unguarded(n.body, n.var) && type_contractive(n.body);
                          },
                          [&](const TypeVar&) { return true; },
                      },
                      g->node);
}

TypePtr substitute_type_var(const TypePtr& body, const TypeRecVar& t, const TypePtr& r) {
    std::set<TypeRecVar> r_free;
    free_tvars_walk(r, {}, r_free);
    std::function<TypePtr(const TypePtr&)> walk = [&](const TypePtr& g) -> TypePtr {
        return std::visit(
            overload{
                [&](const ComType& n) { return tcom(n.from, n.to, n.sort, walk(n.cont)); },
                [&](const ChoiceType& n) {
                    std::map<Label, TypePtr> bs;
                    for (const auto& [l, b] : n.branches) bs[l] = walk(b);
                    return tchoice(n.from, n.to, std::move(bs));
                },
                [&](const EndType&) { return g; },
                [&](const RecType& n) -> TypePtr {
                    if (n.var == t) return g; // shadowed
                    if (r_free.count(n.var)) {
                        // freshen the binder so r's free variable is not captured
                        std::set<TypeRecVar> used = r_free;
                        free_tvars_walk(n.body, {}, used);
                        int i = 1;
                        TypeRecVar nv;
                        do nv = TypeRecVar{n.var.value + "_" + std::to_string(i++)};
                        while (used.count(nv));
                        TypePtr renamed = substitute_type_var(n.body, n.var, tvar(nv));
                        return trec(nv, walk(renamed));
                    }
                    return trec(n.var, walk(n.body));
                },
                [&](const TypeVar& n) { return n.var == t ? r : g; },
            },
            g->node);
    };
    return walk(body);
}

TypePtr unfold_head(TypePtr g) {
    while (const auto* r = std::get_if<RecType>(&g->node)) g = substitute_type_var(r->body, r->var, g);
    return g;
}

namespace {

// Compact serialization of an alpha-canonical type, used as bisimulation keys.
void ser_type(const TypePtr& g, std::string& out) {
    std::visit(overload{
                   [&](const ComType& n) {
                       out += "c(" + n.from.value + "," + n.to.value + "," + sort_name(n.sort) + ";";
                       ser_type(n.cont, out);
                       out += ")";
                   },
                   [&](const ChoiceType& n) {
                       out += "h(" + n.from.value + "," + n.to.value;
                       for (const auto& [l, b] : n.branches) {
                           out += ";" + l.value + ":";
                           ser_type(b, out);
                       }
                       out += ")";
                   },
                   [&](const EndType&) { out += "e"; },
                   [&](const RecType& n) {
                       out += "r(" + n.var.value + ";";
                       ser_type(n.body, out);
                       out += ")";
                   },
                   [&](const TypeVar& n) { out += "v(" + n.var.value + ")"; },
               },
               g->node);
}

std::string type_key(const TypePtr& g) {
    std::string out;
    ser_type(alpha_canonical_type(g), out);
    return out;
}

bool equal_unfolded_rec(const TypePtr& a, const TypePtr& b, std::set<std::pair<std::string, std::string>>& seen) {
    TypePtr ha = unfold_head(a);
    TypePtr hb = unfold_head(b);
    auto key = std::make_pair(type_key(ha), type_key(hb));
    if (!seen.insert(key).second) return true; // revisited pair: coinductively equal
    if (ha->node.index() != hb->node.index()) return false;
    return std::visit(
        overload{
            [&](const ComType& x) {
                const auto& y = std::get<ComType>(hb->node);
                return x.from == y.from && x.to == y.to && x.sort == y.sort &&
                       equal_unfolded_rec(x.cont, y.cont, seen);
            },
            [&](const ChoiceType& x) {
                const auto& y = std::get<ChoiceType>(hb->node);
                if (x.from != y.from || x.to != y.to || x.branches.size() != y.branches.size()) return false;
                auto it = y.branches.begin();
                for (const auto& [l, g] : x.branches) {
                    if (l != it->first || !equal_unfolded_rec(g, it->second, seen)) return false;
                    ++it;
                }
                return true;
            },
            [&](const EndType&) { return true; },
            [&](const RecType&) { return false; },  // unreachable after unfold_head
            [&](const TypeVar&) { return false; },  // free variable: not closed
        },
        ha->node);
}

} // namespace

bool type_equal_unfolded(const TypePtr& a, const TypePtr& b) {
    std::set<std::pair<std::string, std::string>> seen;
    return equal_unfolded_rec(a, b, seen);
}

} // namespace chorm
