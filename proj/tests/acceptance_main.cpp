// Acceptance gate: reproduces the worked client/user/file-server example end
// to end and runs the bulk property suites.  One PASS/FAIL line per
// criterion; a criterion also fails by overrunning its wall-clock budget.
// Exit code is nonzero when anything failed.
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/ast_ops.hpp"
#include "chorm/parser.hpp"
#include "chorm/printer.hpp"
#include "chorm/semantics.hpp"
#include "chorm/transform.hpp"
#include "chorm/typealg.hpp"
#include "chorm/typing.hpp"
#include "chorm/verify.hpp"
#include "fixtures.hpp"

using namespace chorm;
using namespace chorm::testing;

namespace {

int g_failures = 0;

// Runs one criterion under a time budget; the body signals failure by
// throwing.  Budgets are deliberately generous on purpose-built checks and
// tight on the golden-example ones.
void criterion(const std::string& name, double budget_s,
               const std::function<void()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
        body();
    } catch (const std::exception& e) {
        err = e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::ostringstream line;
    if (err.empty() && secs > budget_s) {
        std::ostringstream o;
        o << "over time budget (" << std::fixed << std::setprecision(2) << secs
          << "s > " << budget_s << "s)";
        err = o.str();
    }
    line << (err.empty() ? "PASS" : "FAIL") << ": " << name << " ["
         << std::fixed << std::setprecision(2) << secs << "s]";
    if (!err.empty()) {
        line << "\n      " << err;
        ++g_failures;
    }
    std::cout << line.str() << "\n";
}

void expect(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

std::string slurp(const std::string& name) {
    std::ifstream in(data_path(name), std::ios::binary);
    if (!in) throw std::runtime_error("missing data file: " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ChorPtr load_chor(const std::string& name) {
    auto r = parse_choreography(slurp(name));
    if (!r.ok()) throw std::runtime_error(name + ": " + r.error().to_string());
    return r.value();
}

TypePtr load_type(const std::string& name, const std::string& proto) {
    auto r = parse_global_types(slurp(name));
    if (!r.ok()) throw std::runtime_error(name + ": " + r.error().to_string());
    auto it = r.value().find(proto);
    if (it == r.value().end())
        throw std::runtime_error(name + " declares no protocol " + proto);
    return it->second;
}

int rec_binders(const ChorPtr& c) {
    return std::visit(
        overload{
            [](const SeqNode& n) { return rec_binders(n.cont); },
            [](const CondNode& n) {
                return rec_binders(n.then_branch) + rec_binders(n.else_branch);
            },
            [](const RecNode& n) { return 1 + rec_binders(n.body); },
            [](const CallNode&) { return 0; },
            [](const ResNode& n) { return rec_binders(n.body); },
            [](const InactNode&) { return 0; },
        },
        c->node);
}

TypePtr rename_roles(const TypePtr& g) {
    auto ren = [](const RoleName& r) { return RoleName{"Z" + r.value}; };
    return std::visit(
        overload{
            [&](const ComType& n) {
                return tcom(ren(n.from), ren(n.to), n.sort, rename_roles(n.cont));
            },
            [&](const ChoiceType& n) {
                std::map<Label, TypePtr> branches;
                for (const auto& [l, b] : n.branches)
                    branches[l] = rename_roles(b);
                return tchoice(ren(n.from), ren(n.to), std::move(branches));
            },
            [&](const EndType&) { return tend(); },
            [&](const RecType& n) { return trec(n.var, rename_roles(n.body)); },
            [&](const TypeVar& n) { return tvar(n.var); },
        },
        g->node);
}

// ----------------------------------------------------------- criteria ----

void golden_merge() {
    ChorPtr c1 = load_chor("chor1.gc");
    expect(chor_equal(c1, build_chor1()),
           "the data file and the built fixture disagree");

    // The canonical merged-session name clashes with a session of the input,
    // so the merge goes onto the next fresh name; the comparison does not
    // care because the synthesized start binds the session.
    auto avoid = sessions_mentioned(c1);
    SessChan fresh = fresh_session(SessChan{"k"}, avoid);
    auto merged = merge(c1, fresh, PublicChan{"c"});
    expect(merged.ok(), "merge failed: " + (merged.ok() ? "" : merged.error().message));
    ChorPtr golden = load_chor("chor2_golden.gc");
    expect(alpha_equal_start_insensitive(merged.value(), golden),
           "merged term differs from the golden single-session form");

    auto merged_s = merge(c1, SessChan{"s"}, PublicChan{"c"});
    expect(merged_s.ok() && chor_equal(merged_s.value(), build_chor2("s", "c")),
           "merge onto an explicit session differs from the hand construction");
}

void golden_typing() {
    ChorPtr c1 = load_chor("chor1.gc");
    Gamma gamma;
    gamma[PublicChan{"a"}] = build_ga();
    gamma[PublicChan{"b"}] = build_gb();
    TypeReport r = typecheck(gamma, c1, {}, scripted_sorts());
    expect(r.ok, "typecheck failed: " +
                     (r.errors.empty() ? "" : r.errors[0].message));
    expect(r.completed_sessions ==
               std::set<SessChan>{SessChan{"k"}, SessChan{"k'"}},
           "unexpected completed-session set");
}

void golden_extraction() {
    ChorPtr c1 = load_chor("chor1.gc");
    auto merged = merge(c1, SessChan{"s"}, PublicChan{"c"});
    expect(merged.ok(), "merge failed");
    auto g = extract_type(merged.value(), scripted_sorts());
    expect(g.ok(), "extraction failed: " + (g.ok() ? "" : g.error().message));
    expect(alpha_equal_type(g.value(), build_g_merged()),
           "extracted type differs from the hand construction");
    expect(alpha_equal_type(g.value(), load_type("g_golden.gt", "G")),
           "extracted type differs from the golden file");
}

void golden_mesh() {
    std::vector<TypePtr> originals{build_ga(), build_gb()};
    ChorPtr c1 = load_chor("chor1.gc");
    auto merged = merge(c1, SessChan{"s"}, PublicChan{"c"});
    auto g = extract_type(merged.value(), scripted_sorts());
    expect(g.ok(), "extraction failed");

    MeshReport pos = mesh_member(g.value(), originals, 8, 5, 2);
    expect(pos.member, "extracted type not in the mesh of its originals" +
                           (pos.failing ? ": " + word_text(*pos.failing) : ""));
    expect(pos.witness.has_value(), "membership reported without a witness");

    // The same protocol with its roles spelled the protocol way.
    MeshReport upper =
        mesh_member(load_type("gc.gt", "Gc"), originals, 8, 5, 2);
    expect(upper.member, "role-named variant not in the mesh");

    MeshReport neg = mesh_member(load_type("bad.gt", "Bad"), originals, 8, 5, 2);
    expect(!neg.member, "foreign protocol accepted into the mesh");
    expect(neg.failing.has_value() && neg.failing->size() == 1,
           "expected a length-1 failing path");
}

void bounded_correctness() {
    ChorPtr c1 = load_chor("chor1.gc");
    SessChan s{"s"};
    for (bool outcome : {true, false}) {
        BuiltinEnv env = scripted_env({Value{outcome}});
        Verdict vs = soundness_check(c1, s, env, 12);
        Verdict vc = completeness_check(c1, s, env, 12);
        std::string tag = outcome ? "accepting" : "rejecting";
        expect(vs.passed, "soundness failed under the " + tag + " script");
        expect(vc.passed, "completeness failed under the " + tag + " script");
    }

    // A generated corpus: small well-formed terms, one session, at most two
    // recursion binders.
    std::mt19937 rng(20260823);
    ChorGen gen(rng);
    BuiltinEnv env; // bodies communicate literals only
    int done = 0, attempts = 0;
    while (done < 24 && attempts < 400) {
        ++attempts;
        ChorPtr c = gen.gen(4 + attempts % 6);
        if (!well_formed(c).empty() || rec_binders(c) > 2) continue;
        auto avoid = sessions_mentioned(c);
        SessChan fresh = fresh_session(SessChan{"m"}, avoid);
        Verdict vs = soundness_check(c, fresh, env, 12);
        Verdict vc = completeness_check(c, fresh, env, 12);
        expect(vs.passed, "soundness failed on a generated term:\n" + pretty(c) +
                              (vs.counterexample
                                   ? "\n" + vs.counterexample->explanation
                                   : ""));
        expect(vc.passed, "completeness failed on a generated term:\n" +
                              pretty(c) +
                              (vc.counterexample
                                   ? "\n" + vc.counterexample->explanation
                                   : ""));
        ++done;
    }
    expect(done >= 20, "corpus too small: only " + std::to_string(done) +
                           " qualifying terms");
}

void mutation_sensitivity() {
    ChorPtr c1 = load_chor("chor1.gc");
    SessChan s{"s"};
    BuiltinEnv env = scripted_env({Value{true}});

    // The unmutated body passes both checks, so each defect below is the
    // sole cause of the failures.
    expect(soundness_check_against(c1, s, merged_body("s", Mutation::None), env, 12).passed &&
               completeness_check_against(c1, s, merged_body("s", Mutation::None), env, 12).passed,
           "the unmutated merged body does not pass");

    const std::pair<Mutation, const char*> defects[] = {
        {Mutation::DropCom, "dropped communication"},
        {Mutation::SwapLabels, "swapped branch labels"},
        {Mutation::ReorderComs, "reordered communications"},
        {Mutation::KeepStart, "residual start"},
        {Mutation::RenameRole, "stale role name"},
    };
    for (const auto& [mu, label] : defects) {
        ChorPtr t0 = merged_body("s", mu);
        Verdict vs = soundness_check_against(c1, s, t0, env, 12);
        Verdict vc = completeness_check_against(c1, s, t0, env, 12);
        bool caught = (!vs.passed && vs.counterexample.has_value()) ||
                      (!vc.passed && vc.counterexample.has_value());
        expect(caught, std::string("undetected defect: ") + label);
    }
}

void golden_reduction() {
    ChorPtr c1 = load_chor("chor1.gc");
    Trace t = run(c1, scripted_env({Value{true}}), 2);
    expect(!t.error.has_value(), "unexpected runtime error");
    expect(t.steps.size() == 2, "expected exactly two steps");
    expect(event_text(t.steps[0].event) == "start c[C] u[U] on a as k",
           "first event is not the session start: " +
               event_text(t.steps[0].event));
    expect(event_text(t.steps[1].event) == "com u -> c : \"pwd123\" over k",
           "second event is not the password communication: " +
               event_text(t.steps[1].event));
    expect(t.start_count == 1 && t.fuel_exhausted,
           "trace summary is off");

    // Step one leaves the started session restricted with the communication
    // at the head; step two substitutes the received value.
    expect(std::holds_alternative<ResNode>(t.steps[0].after->node) &&
               std::holds_alternative<ResNode>(t.steps[1].after->node),
           "started session is not restricted");
    const auto& after2 = std::get<ResNode>(t.steps[1].after->node);
    const auto* head = std::get_if<SeqNode>(&after2.body->node);
    expect(head != nullptr && std::holds_alternative<StartEta>(head->head) &&
               std::get<StartEta>(head->head).chan == PublicChan{"b"},
           "second start is not at the head after two steps");
    expect(pretty(t.steps[1].after).find("\"pwd123\" -> f[F].y") !=
               std::string::npos,
           "received value was not substituted forward");
}

void start_elimination() {
    ChorPtr c1 = load_chor("chor1.gc");
    BuiltinEnv env = scripted_env({Value{false}, Value{true}});

    Trace orig = run(c1, env, 64);
    expect(!orig.error.has_value() && !orig.fuel_exhausted,
           "original run did not finish");
    expect(orig.steps.size() == 13, "original event count is off");
    expect(orig.start_count == 4, "original start count is off");

    auto merged = merge(c1, SessChan{"s"}, PublicChan{"c"});
    expect(merged.ok(), "merge failed");
    Trace after = run(merged.value(), env, 64);
    expect(!after.error.has_value() && !after.fuel_exhausted,
           "merged run did not finish");
    expect(after.steps.size() == 10, "merged event count is off");
    expect(after.start_count == 1, "merged start count is off");

    expect(payloads(orig) == payloads(after),
           "communicated values / labels differ between the runs");
}

void property_suites() {
    std::mt19937 rng(90125);
    ChorGen cgen(rng);
    std::vector<RoleName> roles{RoleName{"A"}, RoleName{"B"}, RoleName{"C"}};
    TypeGen tgen(rng, roles);

    // Parser round-trip.
    for (int i = 0; i < 200; ++i) {
        ChorPtr c = cgen.gen(2 + i % 8);
        auto back = parse_choreography(pretty(c));
        expect(back.ok() && chor_equal(back.value(), c),
               "choreography round-trip failed:\n" + pretty(c));
    }
    for (int i = 0; i < 200; ++i) {
        TypePtr g = tgen.gen(2 + i % 6);
        auto back = parse_global_types("protocol P {\n" + pretty(g) + "\n}");
        expect(back.ok() && type_equal(back.value().at("P"), g),
               "type round-trip failed:\n" + pretty(g));
    }

    // Substitution idempotence: once a free name is gone, substituting
    // again is the identity.
    for (int i = 0; i < 200; ++i) {
        ChorPtr c = (i % 4 == 0) ? build_chor1() : cgen.gen(2 + i % 8);
        VarName x{(i % 4 == 0) ? "file" : "x" + std::to_string(i % 5)};
        Value v{std::string("v") + std::to_string(i)};
        ChorPtr once = substitute(c, x, v);
        expect(chor_equal(substitute(once, x, v), once),
               "value substitution is not idempotent");
    }
    for (int i = 0; i < 200; ++i) {
        TypePtr g = tgen.gen(1 + i % 5);
        TypeRecVar q{"q"};
        TypePtr body = tcom(roles[0], roles[1], Sort::Int, tvar(q));
        TypePtr once = substitute_type_var(body, q, g);
        expect(type_equal(substitute_type_var(once, q, g), once),
               "type substitution is not idempotent");
        expect(type_equal(substitute_type_var(g, q, g), g),
               "substitution changed a closed type");
    }

    // Alpha-equality laws: reflexive, symmetric, and transitive through the
    // canonical form and a bound-session renaming.
    for (int i = 0; i < 200; ++i) {
        ChorPtr c = cgen.gen(2 + i % 8);
        expect(alpha_equal(c, c), "alpha_equal is not reflexive");
        auto avoid = sessions_mentioned(c);
        ChorPtr renamed = freshen_bound_sessions(c, avoid);
        expect(alpha_equal(c, renamed) && alpha_equal(renamed, c),
               "alpha_equal is not symmetric under bound-session renaming");
        ChorPtr canon = alpha_canonical(c);
        expect(alpha_equal(c, canon) && alpha_equal(canon, renamed),
               "alpha_equal chain through the canonical form broke");
    }

    // Reduction determinism: never more than one successor.
    {
        BuiltinEnv env;
        for (int i = 0; i < 200; ++i) {
            ChorPtr cur = cgen.gen(2 + i % 7);
            for (int hop = 0; hop < 8; ++hop) {
                ReductionSet r = reductions(cur, env);
                expect(r.successors.size() <= 1,
                       "nondeterministic reduction:\n" + pretty(cur));
                StepResult s = step(cur, env);
                if (!std::holds_alternative<Stepped>(s)) break;
                cur = std::get<Stepped>(s).after;
            }
        }
    }

    // Path enumeration: length-bounded and prefix-closed, maximal words
    // included in the full set.
    for (int i = 0; i < 200; ++i) {
        TypePtr g = tgen.gen(2 + i % 5);
        PathSet ps = enumerate_paths(paths_automaton(g), 4);
        for (const auto& w : ps.all) {
            expect(w.size() <= 4, "path exceeds the depth bound");
            Word prefix;
            for (const auto& ev : w) {
                expect(ps.all.count(prefix) == 1, "path set is not prefix-closed");
                prefix.push_back(ev);
            }
        }
        for (const auto& w : ps.maximal)
            expect(ps.all.count(w) == 1, "maximal word missing from the path set");
    }

    // Mesh membership: reflexive, and closed under injective role renaming
    // of the candidate.
    for (int i = 0; i < 200; ++i) {
        TypePtr g = tgen.gen(1 + i % 4);
        expect(mesh_member(g, {g}, 4, 4, 1).member,
               "mesh membership is not reflexive:\n" + pretty(g));
        expect(mesh_member(rename_roles(g), {g}, 4, 4, 1).member,
               "mesh membership is not closed under role renaming:\n" +
                   pretty(g));
    }
}

} // namespace

int main() {
    criterion("merging the worked example yields the single-session form", 1.0,
              golden_merge);
    criterion("the worked example typechecks against its two protocols", 1.0,
              golden_typing);
    criterion("the merged example's global type is extracted exactly", 1.0,
              golden_extraction);
    criterion("mesh membership holds at (D=8, L=5, M=2), foreign type rejected",
              5.0, golden_mesh);
    criterion("bounded soundness and completeness on the example and a corpus",
              60.0, bounded_correctness);
    criterion("every seeded transformation defect is detected", 60.0,
              mutation_sensitivity);
    criterion("the first two reduction steps replay exactly", 1.0,
              golden_reduction);
    criterion("merging removes starts but preserves the communicated data",
              1.0, start_elimination);
    criterion("bulk property suites (parser, substitution, alpha, reduction, "
              "paths, mesh)",
              120.0, property_suites);

    if (g_failures != 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
