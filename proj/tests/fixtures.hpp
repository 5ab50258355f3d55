// Doctest-free test fixtures: the worked client/user/file-server example,
// scripted environments, random generators, seeded transformation defects,
// and small independent oracles.  Shared by the unit suite (via helpers.hpp)
// and the acceptance binary.
#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/ast_ops.hpp"
#include "chorm/semantics.hpp"
#include "chorm/typealg.hpp"
#include "chorm/typing.hpp"

namespace chorm::testing {

inline std::string data_path(const std::string& name) {
    return std::string(CHORM_TEST_DATA_DIR) + "/" + name;
}

// ------------------------------------------------- the worked example ----
//
// Client c asks user u for a password over session k (public channel a),
// forwards it to file server f over session k' (channel b), and loops
// until the check succeeds.  Built by hand so parsed data files can be
// compared against an independent construction.

inline ChorPtr build_chor1(const std::string& first_session = "k",
                           const std::string& second_session = "k'") {
    Participant cC{ThreadId{"c"}, RoleName{"C"}};
    Participant uU{ThreadId{"u"}, RoleName{"U"}};
    Participant fF{ThreadId{"f"}, RoleName{"F"}};
    SessChan k{first_session}, kp{second_session};

    ChorPtr then_branch =
        seq(SelEta{fF, cC, kp, Label{"ok"}},
            seq(ComEta{cC, var(VarName{"file"}), fF, VarName{"z"}, kp}, inact()));
    ChorPtr else_branch =
        seq(SelEta{fF, cC, kp, Label{"quit"}}, rec_call(ChorRecVar{"X"}));
    ChorPtr body = seq(
        StartEta{{cC, uU}, PublicChan{"a"}, k},
        seq(ComEta{uU, call("password", {}), cC, VarName{"pwd"}, k},
            seq(StartEta{{cC, fF}, PublicChan{"b"}, kp},
                seq(ComEta{cC, var(VarName{"pwd"}), fF, VarName{"y"}, kp},
                    cond(ThreadId{"f"}, call("check", {var(VarName{"y"})}),
                         then_branch, else_branch)))));
    return rec(ChorRecVar{"X"}, body);
}

// The single-session form: roles renamed to thread names, everything over
// one session, one synthesized start on the given channel.
inline ChorPtr build_chor2(const std::string& session, const std::string& chan) {
    Participant cc{ThreadId{"c"}, RoleName{"c"}};
    Participant uu{ThreadId{"u"}, RoleName{"u"}};
    Participant ff{ThreadId{"f"}, RoleName{"f"}};
    SessChan k{session};

    ChorPtr then_branch =
        seq(SelEta{ff, cc, k, Label{"ok"}},
            seq(ComEta{cc, var(VarName{"file"}), ff, VarName{"z"}, k}, inact()));
    ChorPtr else_branch =
        seq(SelEta{ff, cc, k, Label{"quit"}}, rec_call(ChorRecVar{"X"}));
    ChorPtr body =
        seq(ComEta{uu, call("password", {}), cc, VarName{"pwd"}, k},
            seq(ComEta{cc, var(VarName{"pwd"}), ff, VarName{"y"}, k},
                cond(ThreadId{"f"}, call("check", {var(VarName{"y"})}),
                     then_branch, else_branch)));
    return seq(StartEta{{uu, cc, ff}, PublicChan{chan}, k},
               rec(ChorRecVar{"X"}, body));
}

// Global type of the single-session form (roles are thread names).
inline TypePtr build_g_merged() {
    RoleName u{"u"}, c{"c"}, f{"f"};
    std::map<Label, TypePtr> branches;
    branches[Label{"ok"}] = tcom(c, f, Sort::File, tend());
    branches[Label{"quit"}] = tvar(TypeRecVar{"t"});
    return trec(TypeRecVar{"t"},
                tcom(u, c, Sort::String,
                     tcom(c, f, Sort::String, tchoice(f, c, branches))));
}

inline TypePtr build_ga() {
    return tcom(RoleName{"U"}, RoleName{"C"}, Sort::String, tend());
}

inline TypePtr build_gb() {
    std::map<Label, TypePtr> branches;
    branches[Label{"ok"}] =
        tcom(RoleName{"C"}, RoleName{"F"}, Sort::File, tend());
    branches[Label{"quit"}] = tend();
    return tcom(RoleName{"C"}, RoleName{"F"}, Sort::String,
                tchoice(RoleName{"F"}, RoleName{"C"}, branches));
}

// ------------------------------------------------ scripted environments ----

inline BuiltinEnv scripted_env(std::vector<Value> check_values) {
    BuiltinEnv env;
    env.functions["password"] =
        BuiltinFn{Signature{{}, Sort::String}, {Value{std::string("pwd123")}}};
    env.functions["check"] =
        BuiltinFn{Signature{{Sort::String}, Sort::Bool}, std::move(check_values)};
    env.bindings[{ThreadId{"c"}, VarName{"file"}}] =
        Value{FileBytes{"file-bytes"}};
    return env;
}

inline SortEnv scripted_sorts() {
    SortEnv sorts;
    sorts.sigs["password"] = Signature{{}, Sort::String};
    sorts.sigs["check"] = Signature{{Sort::String}, Sort::Bool};
    sorts.vars[{ThreadId{"c"}, VarName{"file"}}] = Sort::File;
    return sorts;
}

// Com payloads and selected labels of a trace, in order.  Starts and
// conditional outcomes are deliberately excluded: this is the observable
// data exchanged, which session restructuring must preserve.
inline std::vector<std::string> payloads(const Trace& t) {
    std::vector<std::string> out;
    for (const auto& st : t.steps) {
        if (const auto* c = std::get_if<EvCom>(&st.event))
            out.push_back(value_repr(c->value));
        else if (const auto* s = std::get_if<EvSel>(&st.event))
            out.push_back(s->label.value);
    }
    return out;
}

// --------------------------------------------------- seeded defects ----

enum class Mutation { None, DropCom, SwapLabels, ReorderComs, KeepStart, RenameRole };

// The correctly merged body of the worked example over the given session,
// with one seeded defect per mutation.
inline ChorPtr merged_body(const std::string& session, Mutation mu) {
    Participant cc{ThreadId{"c"}, RoleName{"c"}};
    Participant uu{ThreadId{"u"}, RoleName{"u"}};
    Participant ff{ThreadId{"f"}, RoleName{"f"}};
    SessChan k{session};
    Label ok{mu == Mutation::SwapLabels ? "quit" : "ok"};
    Label quit{mu == Mutation::SwapLabels ? "ok" : "quit"};
    Participant sender1 = uu;
    if (mu == Mutation::RenameRole) sender1.role = RoleName{"U"};

    ChorPtr then_branch = seq(SelEta{ff, cc, k, ok},
                              seq(ComEta{cc, var(VarName{"file"}), ff, VarName{"z"}, k}, inact()));
    ChorPtr else_branch = seq(SelEta{ff, cc, k, quit}, rec_call(ChorRecVar{"X"}));
    ChorPtr tail = cond(ThreadId{"f"}, call("check", {var(VarName{"y"})}), then_branch, else_branch);
    ComEta com1{sender1, call("password", {}), cc, VarName{"pwd"}, k};
    ComEta com2{cc, var(VarName{"pwd"}), ff, VarName{"y"}, k};
    ChorPtr body;
    switch (mu) {
    case Mutation::DropCom: body = seq(com1, tail); break;
    case Mutation::ReorderComs: body = seq(com2, seq(com1, tail)); break;
    default: body = seq(com1, seq(com2, tail)); break;
    }
    ChorPtr out = rec(ChorRecVar{"X"}, body);
    if (mu == Mutation::KeepStart)
        out = seq(StartEta{{uu, cc, ff}, PublicChan{"c"}, k}, out);
    return out;
}

// ------------------------------------------------------ random terms ----

// Random closed, contractive global types over the given roles.
class TypeGen {
public:
    TypeGen(std::mt19937& rng, std::vector<RoleName> roles)
        : rng_(rng), roles_(std::move(roles)) {}

    TypePtr gen(int budget) { return go(budget, 0, false); }

private:
    std::mt19937& rng_;
    std::vector<RoleName> roles_;
    int next_var_ = 0;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    std::pair<RoleName, RoleName> two_roles() {
        int a = pick(static_cast<int>(roles_.size()));
        int b = pick(static_cast<int>(roles_.size()) - 1);
        if (b >= a) ++b;
        return {roles_[a], roles_[b]};
    }

    Sort any_sort() {
        switch (pick(4)) {
        case 0: return Sort::Bool;
        case 1: return Sort::Int;
        case 2: return Sort::String;
        default: return Sort::File;
        }
    }

    // `bound` counts enclosing rec binders; `guarded` is true when at least
    // one interaction separates this position from every enclosing binder,
    // which is exactly when emitting a type variable keeps the result
    // contractive.
    TypePtr go(int budget, int bound, bool guarded) {
        if (budget <= 0) {
            if (bound > 0 && guarded && pick(2) == 0)
                return tvar(TypeRecVar{"t" + std::to_string(pick(bound))});
            return tend();
        }
        int roll = pick(10);
        if (roll < 4) {
            auto [p, q] = two_roles();
            return tcom(p, q, any_sort(), go(budget - 1, bound, true));
        }
        if (roll < 6) {
            auto [p, q] = two_roles();
            std::map<Label, TypePtr> branches;
            int n = 2 + pick(2);
            for (int i = 0; i < n; ++i)
                branches[Label{"l" + std::to_string(i)}] =
                    go(budget / 2, bound, true);
            return tchoice(p, q, branches);
        }
        if (roll < 8) {
            // Binder names follow de Bruijn-style levels so nested binders
            // never collide.
            TypeRecVar v{"t" + std::to_string(bound)};
            return trec(v, go(budget - 1, bound + 1, false));
        }
        if (bound > 0 && guarded)
            return tvar(TypeRecVar{"t" + std::to_string(pick(bound))});
        return tend();
    }
};

// Random well-formed, closed, runnable choreographies: a start prefix
// brings all threads into one session, the body communicates literals so
// execution never needs builtins.
class ChorGen {
public:
    explicit ChorGen(std::mt19937& rng) : rng_(rng) {}

    ChorPtr gen(int budget, int n_threads = 3) {
        n_threads = std::max(2, n_threads);
        std::vector<Participant> parts;
        for (int i = 0; i < n_threads; ++i)
            parts.push_back(participant(i));
        ChorPtr body = go(budget, 0, false, n_threads);
        return seq(StartEta{parts, PublicChan{"a"}, SessChan{"k"}}, body);
    }

private:
    std::mt19937& rng_;
    int next_var_ = 0;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    Participant participant(int i) {
        static const char* threads[] = {"t1", "t2", "t3", "t4"};
        static const char* roles[] = {"A", "B", "C", "D"};
        return {ThreadId{threads[i]}, RoleName{roles[i]}};
    }

    ExprPtr any_lit() {
        switch (pick(3)) {
        case 0: return lit(Value{static_cast<std::int64_t>(pick(100))});
        case 1: return lit(Value{std::string("s") + std::to_string(pick(10))});
        default: return lit(Value{pick(2) == 0});
        }
    }

    ChorPtr go(int budget, int bound, bool guarded, int n) {
        if (budget <= 0) {
            if (bound > 0 && guarded && pick(2) == 0)
                return rec_call(ChorRecVar{"X" + std::to_string(pick(bound))});
            return inact();
        }
        int roll = pick(10);
        int i = pick(n);
        int j = pick(n - 1);
        if (j >= i) ++j;
        if (roll < 4) {
            VarName x{"x" + std::to_string(next_var_++)};
            return seq(ComEta{participant(i), any_lit(), participant(j), x,
                              SessChan{"k"}},
                       go(budget - 1, bound, true, n));
        }
        if (roll < 6) {
            Label l{pick(2) == 0 ? "left" : "right"};
            return seq(SelEta{participant(i), participant(j), SessChan{"k"}, l},
                       go(budget - 1, bound, true, n));
        }
        if (roll < 8) {
            return cond(participant(i).thread, lit(Value{pick(2) == 0}),
                        go(budget / 2, bound, true, n),
                        go(budget / 2, bound, true, n));
        }
        if (roll < 9) {
            ChorRecVar v{"X" + std::to_string(bound)};
            return rec(v, go(budget - 1, bound + 1, false, n));
        }
        if (bound > 0 && guarded)
            return rec_call(ChorRecVar{"X" + std::to_string(pick(bound))});
        return inact();
    }
};

// ---------------------------------------------------- shuffle oracle ----
//
// Exhaustive check that `word` splits into at most `m` subsequences, each
// of which is a concatenation of base words.  Independent of the library's
// search: enumerate every coloring, then run word-break over each class.

inline bool word_breaks(const Word& w, const std::set<Word>& bases) {
    std::vector<char> can(w.size() + 1, 0);
    can[0] = 1;
    for (std::size_t i = 1; i <= w.size(); ++i) {
        for (const auto& b : bases) {
            if (b.empty() || b.size() > i || !can[i - b.size()]) continue;
            if (std::equal(b.begin(), b.end(), w.begin() + (i - b.size()))) {
                can[i] = 1;
                break;
            }
        }
    }
    return can[w.size()] != 0;
}

inline bool oracle_shuffle(const Word& w, const std::set<Word>& bases, int m) {
    if (w.empty()) return true;
    std::vector<int> color(w.size(), 0);
    while (true) {
        std::vector<Word> classes(m);
        for (std::size_t i = 0; i < w.size(); ++i)
            classes[static_cast<std::size_t>(color[i])].push_back(w[i]);
        bool ok = true;
        for (const auto& cls : classes)
            if (!cls.empty() && !word_breaks(cls, bases)) ok = false;
        if (ok) return true;
        // Next coloring in base-m counting order.
        std::size_t i = 0;
        for (; i < w.size(); ++i) {
            if (++color[i] < m) break;
            color[i] = 0;
        }
        if (i == w.size()) return false;
    }
}

} // namespace chorm::testing
