// chorm: command line front end for the choreography toolkit.
//
// Subcommands mirror the library layers: parse, check, run, merge, extract,
// mesh, verify, and a pipeline command that chains them.  Every subcommand
// accepts --format text|json.  Exit codes: 0 on success / positive verdicts,
// 1 on negative verdicts (type errors, runtime errors, non-membership,
// failed verification), 2 on usage or syntax errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <chorm/ast.hpp>
#include <chorm/ast_ops.hpp>
#include <chorm/json_io.hpp>
#include <chorm/parser.hpp>
#include <chorm/printer.hpp>
#include <chorm/semantics.hpp>
#include <chorm/transform.hpp>
#include <chorm/typealg.hpp>
#include <chorm/typing.hpp>
#include <chorm/verify.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace chorm;

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

bool read_file(const std::string& path, std::string& out, std::string& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err = "cannot open file: " + path;
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

// Either a choreography is loaded or the process exits with code 2.
struct ChorLoad {
    ChorPtr chor;
    int rc = 0;  // nonzero means: print nothing more, exit with rc
};

ChorLoad load_chor(const std::string& path) {
    std::string text, err;
    if (!read_file(path, text, err)) {
        usage_error(err);
        return {nullptr, 2};
    }
    auto parsed = parse_choreography(text);
    if (!parsed.ok()) {
        std::cerr << path << ": " << parsed.error().to_string() << "\n";
        return {nullptr, 2};
    }
    return {parsed.value(), 0};
}

struct TypesLoad {
    std::map<std::string, TypePtr> protocols;
    int rc = 0;
};

TypesLoad load_types(const std::string& path) {
    std::string text, err;
    if (!read_file(path, text, err)) {
        usage_error(err);
        return {{}, 2};
    }
    auto parsed = parse_global_types(text);
    if (!parsed.ok()) {
        std::cerr << path << ": " << parsed.error().to_string() << "\n";
        return {{}, 2};
    }
    return {parsed.value(), 0};
}

struct EnvLoad {
    LoadedEnv loaded;
    int rc = 0;
};

EnvLoad load_env(const std::string& path) {
    if (path.empty()) return {{}, 0};
    auto r = load_env_file(path);
    if (!r.ok()) {
        usage_error("environment file " + path + ": " + r.error());
        return {{}, 2};
    }
    return {r.value(), 0};
}

void print_report_text(const TypeReport& report, std::ostream& os) {
    if (report.ok) {
        os << "well-typed";
        if (!report.completed_sessions.empty()) {
            os << " (completed sessions:";
            for (const auto& k : report.completed_sessions) os << " " << k.value;
            os << ")";
        }
        os << "\n";
    } else {
        os << "type errors:\n";
        for (const auto& d : report.errors) {
            os << "  at " << (d.path.empty() ? "<top>" : d.path) << ": "
               << d.message << "\n";
        }
    }
}

void print_verdict_text(const Verdict& v, std::ostream& os) {
    os << (v.property == Property::Soundness ? "soundness" : "completeness")
       << ": " << (v.passed ? "passed" : "FAILED") << " (depth "
       << v.depth_checked << ")\n";
    if (!v.passed && v.counterexample) {
        const auto& cx = *v.counterexample;
        os << "  " << cx.explanation << "\n";
        os << "  state: " << cx.state_before << "\n";
        if (cx.step_taken) os << "  step: " << event_text(*cx.step_taken) << "\n";
        if (!cx.trace.empty()) {
            os << "  trace so far:\n";
            for (const auto& ev : cx.trace) os << "    " << event_text(ev) << "\n";
        }
    }
}

void print_mesh_text(const MeshReport& report, std::ostream& os) {
    os << "member: " << (report.member ? "true" : "false") << " (checked "
       << report.checked_paths << " maximal path(s) at depth "
       << report.depth_bound << ", base length " << report.base_bound
       << ", components " << report.component_bound << ")\n";
    if (!report.member && report.failing) {
        os << "  failing path: " << word_text(*report.failing) << "\n";
    }
    if (report.member && report.witness) {
        const auto& w = *report.witness;
        os << "  witness components (longest path):\n";
        for (std::size_t i = 0; i < w.components.size(); ++i) {
            const auto& comp = w.components[i];
            os << "    [" << i << "] original #" << comp.original_index;
            if (!comp.renaming.empty()) {
                os << " renaming {";
                bool first = true;
                for (const auto& [from, to] : comp.renaming) {
                    if (!first) os << ", ";
                    first = false;
                    os << from.value << "->" << to.value;
                }
                os << "}";
            }
            os << " words:";
            for (const auto& word : comp.words) os << " [" << word_text(word) << "]";
            os << "\n";
        }
    }
}

// ---------------------------------------------------------------- parse ----

int cmd_parse(const std::string& file, const std::string& format) {
    std::filesystem::path p(file);
    if (p.extension() == ".gt") {
        auto types = load_types(file);
        if (types.rc) return types.rc;
        if (format == "json") {
            json out;
            out["protocols"] = json::object();
            for (const auto& [name, g] : types.protocols)
                out["protocols"][name] = type_to_json(g);
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << pretty_protocols(types.protocols);
        }
        return 0;
    }
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;
    if (format == "json") {
        std::cout << chor_to_json(chor.chor).dump(2) << "\n";
    } else {
        std::cout << pretty(chor.chor);
    }
    return 0;
}

// ---------------------------------------------------------------- check ----

int cmd_check(const std::string& file, const std::string& protocols_file,
              const std::vector<std::string>& binds, const std::string& env_file,
              const std::string& format) {
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;
    auto types = load_types(protocols_file);
    if (types.rc) return types.rc;
    auto env = load_env(env_file);
    if (env.rc) return env.rc;

    auto wf = well_formed(chor.chor);
    if (!wf.empty()) {
        TypeReport report;
        report.ok = false;
        report.errors = wf;
        if (format == "json")
            std::cout << type_report_to_json(report).dump(2) << "\n";
        else
            print_report_text(report, std::cout);
        return 1;
    }

    auto gamma = auto_bind(chor.chor, types.protocols, binds);
    if (!gamma.ok()) return usage_error(gamma.error());

    TypeReport report = typecheck(gamma.value(), chor.chor, {}, env.loaded.sorts);
    if (format == "json")
        std::cout << type_report_to_json(report).dump(2) << "\n";
    else
        print_report_text(report, std::cout);
    return report.ok ? 0 : 1;
}

// ------------------------------------------------------------------ run ----

int cmd_run(const std::string& file, const std::string& env_file, int fuel,
            const std::string& format) {
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;
    auto env = load_env(env_file);
    if (env.rc) return env.rc;

    Trace trace = run(chor.chor, env.loaded.env, fuel);
    if (format == "json") {
        std::cout << trace_to_json(trace).dump(2) << "\n";
    } else {
        for (const auto& st : trace.steps)
            std::cout << event_text(st.event) << "\n";
        std::cout << "events: " << trace.steps.size()
                  << ", starts: " << trace.start_count << ", fuel exhausted: "
                  << (trace.fuel_exhausted ? "true" : "false") << "\n";
        if (trace.error) {
            std::cout << "error at " << trace.error->path << ": "
                      << trace.error->error.message << "\n";
        }
    }
    return trace.error ? 1 : 0;
}

// ---------------------------------------------------------------- merge ----

int cmd_merge(const std::string& file, std::string session,
              const std::string& chan, const std::string& out_file,
              const std::string& format) {
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;

    if (session.empty()) {
        auto avoid = sessions_mentioned(chor.chor);
        session = fresh_session(SessChan{"k"}, avoid).value;
    }
    auto merged = merge(chor.chor, SessChan{session}, PublicChan{chan});
    if (!merged.ok()) {
        std::cerr << "merge failed: " << merged.error().message << "\n";
        return 1;
    }
    std::string text = pretty(merged.value());
    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) return usage_error("cannot write file: " + out_file);
        out << text;
    }
    if (format == "json") {
        json out;
        out["session"] = session;
        out["merged"] = text;
        out["ast"] = chor_to_json(merged.value());
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << text;
    }
    return 0;
}

// -------------------------------------------------------------- extract ----

int cmd_extract(const std::string& file, const std::string& env_file,
                const std::string& format) {
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;
    auto env = load_env(env_file);
    if (env.rc) return env.rc;

    auto extracted = extract_type(chor.chor, env.loaded.sorts);
    if (!extracted.ok()) {
        const auto& e = extracted.error();
        std::cerr << "extraction failed at "
                  << (e.path.empty() ? "<top>" : e.path) << ": " << e.message
                  << "\n";
        return 1;
    }
    if (format == "json") {
        json out;
        out["type"] = type_to_json(extracted.value());
        out["pretty"] = pretty(extracted.value());
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << pretty(extracted.value()) << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- mesh ----

int cmd_mesh(const std::string& candidate_file,
             const std::vector<std::string>& against_files, int depth,
             int base_len, int m_bound, const std::string& format) {
    auto cand = load_types(candidate_file);
    if (cand.rc) return cand.rc;
    if (cand.protocols.empty())
        return usage_error("candidate file declares no protocols: " +
                           candidate_file);
    TypePtr candidate = cand.protocols.begin()->second;

    std::vector<TypePtr> originals;
    for (const auto& path : against_files) {
        auto types = load_types(path);
        if (types.rc) return types.rc;
        for (const auto& [name, g] : types.protocols) originals.push_back(g);
    }
    if (originals.empty())
        return usage_error("no originals supplied via --against");
    if (m_bound <= 0) m_bound = static_cast<int>(originals.size());

    MeshReport report = mesh_member(candidate, originals, depth, base_len, m_bound);
    if (format == "json")
        std::cout << mesh_report_to_json(report).dump(2) << "\n";
    else
        print_mesh_text(report, std::cout);
    return report.member ? 0 : 1;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(const std::string& file, std::string session,
               const std::string& env_file, int depth,
               const std::string& format) {
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;
    auto env = load_env(env_file);
    if (env.rc) return env.rc;

    if (session.empty()) {
        auto avoid = sessions_mentioned(chor.chor);
        session = fresh_session(SessChan{"k"}, avoid).value;
    }
    Verdict sound =
        soundness_check(chor.chor, SessChan{session}, env.loaded.env, depth);
    Verdict complete =
        completeness_check(chor.chor, SessChan{session}, env.loaded.env, depth);
    if (format == "json") {
        json out;
        out["soundness"] = verdict_to_json(sound);
        out["completeness"] = verdict_to_json(complete);
        std::cout << out.dump(2) << "\n";
    } else {
        print_verdict_text(sound, std::cout);
        print_verdict_text(complete, std::cout);
    }
    return (sound.passed && complete.passed) ? 0 : 1;
}

// ------------------------------------------------------------- pipeline ----

int cmd_pipeline(const std::string& file, const std::string& protocols_file,
                 const std::vector<std::string>& binds,
                 const std::string& env_file, std::string session,
                 const std::string& chan, int depth, int mesh_depth,
                 int base_len, int m_bound, const std::string& format) {
    auto chor = load_chor(file);
    if (chor.rc) return chor.rc;
    auto types = load_types(protocols_file);
    if (types.rc) return types.rc;
    auto env = load_env(env_file);
    if (env.rc) return env.rc;

    json out;
    bool all_ok = true;
    bool text = format != "json";

    // Stage 1: well-formedness + typing.
    auto wf = well_formed(chor.chor);
    TypeReport report;
    if (!wf.empty()) {
        report.ok = false;
        report.errors = wf;
    } else {
        auto gamma = auto_bind(chor.chor, types.protocols, binds);
        if (!gamma.ok()) return usage_error(gamma.error());
        report = typecheck(gamma.value(), chor.chor, {}, env.loaded.sorts);
    }
    all_ok = all_ok && report.ok;
    out["check"] = type_report_to_json(report);
    if (text) {
        std::cout << "[check] ";
        print_report_text(report, std::cout);
    }

    // Stage 2: merge.
    if (session.empty()) {
        auto avoid = sessions_mentioned(chor.chor);
        session = fresh_session(SessChan{"k"}, avoid).value;
    }
    auto merged = merge(chor.chor, SessChan{session}, PublicChan{chan});
    if (!merged.ok()) {
        if (text)
            std::cout << "[merge] failed: " << merged.error().message << "\n";
        out["merge"] = {{"ok", false}, {"error", merged.error().message}};
        if (!text) std::cout << out.dump(2) << "\n";
        return 1;
    }
    out["merge"] = {{"ok", true},
                    {"session", session},
                    {"merged", pretty(merged.value())}};
    if (text) std::cout << "[merge] ok (session " << session << ")\n";

    // Stage 3: extract the merged choreography's global type.
    auto extracted = extract_type(merged.value(), env.loaded.sorts);
    if (!extracted.ok()) {
        if (text)
            std::cout << "[extract] failed: " << extracted.error().message
                      << "\n";
        out["extract"] = {{"ok", false}, {"error", extracted.error().message}};
        if (!text) std::cout << out.dump(2) << "\n";
        return 1;
    }
    out["extract"] = {{"ok", true},
                      {"type", type_to_json(extracted.value())},
                      {"pretty", pretty(extracted.value())}};
    if (text) std::cout << "[extract] " << pretty(extracted.value()) << "\n";

    // Stage 4: mesh membership of the extracted type in the protocol set.
    std::vector<TypePtr> originals;
    for (const auto& [name, g] : types.protocols) originals.push_back(g);
    int m = m_bound > 0 ? m_bound : static_cast<int>(originals.size());
    MeshReport mesh =
        mesh_member(extracted.value(), originals, mesh_depth, base_len, m);
    all_ok = all_ok && mesh.member;
    out["mesh"] = mesh_report_to_json(mesh);
    if (text) {
        std::cout << "[mesh] ";
        print_mesh_text(mesh, std::cout);
    }

    // Stage 5: behavioural verification of the merge transformation.
    Verdict sound =
        soundness_check(chor.chor, SessChan{session}, env.loaded.env, depth);
    Verdict complete =
        completeness_check(chor.chor, SessChan{session}, env.loaded.env, depth);
    all_ok = all_ok && sound.passed && complete.passed;
    out["soundness"] = verdict_to_json(sound);
    out["completeness"] = verdict_to_json(complete);
    if (text) {
        std::cout << "[verify] ";
        print_verdict_text(sound, std::cout);
        std::cout << "[verify] ";
        print_verdict_text(complete, std::cout);
    }

    if (!text) std::cout << out.dump(2) << "\n";
    if (text)
        std::cout << "pipeline: " << (all_ok ? "ok" : "FAILED") << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chorm: choreography toolkit (parse, type, run, merge, "
                 "extract, mesh, verify)"};
    app.require_subcommand(1);

    std::string format = "text";
    app.add_option("--format", format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    // parse
    auto* sc_parse = app.add_subcommand("parse", "parse a .gc or .gt file and "
                                                 "print it back");
    std::string parse_file;
    sc_parse->add_option("file", parse_file, "input file")->required();

    // check
    auto* sc_check = app.add_subcommand("check", "typecheck a choreography "
                                                 "against protocols");
    std::string check_file, check_protocols, check_env;
    std::vector<std::string> check_binds;
    sc_check->add_option("file", check_file, "choreography file")->required();
    sc_check->add_option("--protocols", check_protocols, "protocol (.gt) file")
        ->required();
    sc_check->add_option("--bind", check_binds,
                         "bind CHANNEL=PROTOCOL (repeatable)");
    sc_check->add_option("--env", check_env, "builtin environment (JSON)");

    // run
    auto* sc_run = app.add_subcommand("run", "execute a choreography");
    std::string run_file, run_env;
    int run_fuel = 64;
    sc_run->add_option("file", run_file, "choreography file")->required();
    sc_run->add_option("--env", run_env, "builtin environment (JSON)");
    sc_run->add_option("--fuel", run_fuel, "maximum number of steps")
        ->capture_default_str();

    // merge
    auto* sc_merge = app.add_subcommand(
        "merge", "collapse all sessions of a choreography onto one");
    std::string merge_file, merge_session, merge_chan = "c", merge_out;
    sc_merge->add_option("file", merge_file, "choreography file")->required();
    sc_merge->add_option("--session", merge_session,
                         "name for the merged session (default: fresh)");
    sc_merge->add_option("--chan", merge_chan, "public channel for the "
                                               "synthesized start")
        ->capture_default_str();
    sc_merge->add_option("-o,--out", merge_out, "write merged choreography "
                                                "to a file");

    // extract
    auto* sc_extract = app.add_subcommand(
        "extract", "extract the global type of a single-session choreography");
    std::string extract_file, extract_env;
    sc_extract->add_option("file", extract_file, "choreography file")
        ->required();
    sc_extract->add_option("--env", extract_env, "builtin environment (JSON)");

    // mesh
    auto* sc_mesh = app.add_subcommand(
        "mesh", "bounded mesh membership of a candidate global type");
    std::string mesh_candidate;
    std::vector<std::string> mesh_against;
    int mesh_depth = 8, mesh_base = 5, mesh_m = 0;
    sc_mesh->add_option("--candidate", mesh_candidate,
                        "candidate .gt file (first protocol)")
        ->required();
    sc_mesh->add_option("--against", mesh_against,
                        "original .gt files (all protocols, repeatable)")
        ->required();
    sc_mesh->add_option("-D,--depth", mesh_depth, "path depth bound")
        ->capture_default_str();
    sc_mesh->add_option("-L,--base", mesh_base, "base word length bound")
        ->capture_default_str();
    sc_mesh->add_option("-M,--components", mesh_m,
                        "component bound (default: number of originals)");

    // verify
    auto* sc_verify = app.add_subcommand(
        "verify", "check soundness and completeness of the merge");
    std::string verify_file, verify_session, verify_env;
    int verify_depth = 12;
    sc_verify->add_option("file", verify_file, "choreography file")->required();
    sc_verify->add_option("--session", verify_session,
                          "merged session name (default: fresh)");
    sc_verify->add_option("--env", verify_env, "builtin environment (JSON)");
    sc_verify->add_option("--depth", verify_depth, "bisimulation depth bound")
        ->capture_default_str();

    // pipeline
    auto* sc_pipeline = app.add_subcommand(
        "pipeline", "check, merge, extract, mesh and verify in one pass");
    std::string pipe_file, pipe_protocols, pipe_env, pipe_session,
        pipe_chan = "c";
    std::vector<std::string> pipe_binds;
    int pipe_depth = 12, pipe_mesh_depth = 8, pipe_base = 5, pipe_m = 0;
    sc_pipeline->add_option("file", pipe_file, "choreography file")->required();
    sc_pipeline->add_option("--protocols", pipe_protocols, "protocol file")
        ->required();
    sc_pipeline->add_option("--bind", pipe_binds,
                            "bind CHANNEL=PROTOCOL (repeatable)");
    sc_pipeline->add_option("--env", pipe_env, "builtin environment (JSON)");
    sc_pipeline->add_option("--session", pipe_session,
                            "merged session name (default: fresh)");
    sc_pipeline->add_option("--chan", pipe_chan, "public channel for the "
                                                 "synthesized start")
        ->capture_default_str();
    sc_pipeline->add_option("--depth", pipe_depth, "verification depth bound")
        ->capture_default_str();
    sc_pipeline->add_option("-D,--mesh-depth", pipe_mesh_depth,
                            "mesh path depth bound")
        ->capture_default_str();
    sc_pipeline->add_option("-L,--base", pipe_base, "mesh base word length")
        ->capture_default_str();
    sc_pipeline->add_option("-M,--components", pipe_m,
                            "mesh component bound (default: protocol count)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (sc_parse->parsed()) return cmd_parse(parse_file, format);
    if (sc_check->parsed())
        return cmd_check(check_file, check_protocols, check_binds, check_env,
                         format);
    if (sc_run->parsed()) return cmd_run(run_file, run_env, run_fuel, format);
    if (sc_merge->parsed())
        return cmd_merge(merge_file, merge_session, merge_chan, merge_out,
                         format);
    if (sc_extract->parsed())
        return cmd_extract(extract_file, extract_env, format);
    if (sc_mesh->parsed())
        return cmd_mesh(mesh_candidate, mesh_against, mesh_depth, mesh_base,
                        mesh_m, format);
    if (sc_verify->parsed())
        return cmd_verify(verify_file, verify_session, verify_env, verify_depth,
                          format);
    if (sc_pipeline->parsed())
        return cmd_pipeline(pipe_file, pipe_protocols, pipe_binds, pipe_env,
                            pipe_session, pipe_chan, pipe_depth,
                            pipe_mesh_depth, pipe_base, pipe_m, format);
    return usage_error("no subcommand given");
}
