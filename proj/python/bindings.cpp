// Python bindings for the choreography toolkit.  Every entry point takes
// plain strings and returns a JSON document as a string; the Python wrapper
// in chorm/__init__.py decodes it.  Keeping the boundary stringly-typed
// avoids mirroring the whole AST as Python classes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

#include <string>
#include <vector>

namespace py = pybind11;

namespace {

using chorm::json;

json err_doc(const json& detail) {
    return json{{"ok", false}, {"error", detail}};
}

// Parse an environment document (may be empty for "no environment").
bool parse_env(const std::string& env_json, chorm::LoadedEnv& out, json& err) {
    if (env_json.empty()) return true;
    json doc = json::parse(env_json, nullptr, false);
    if (doc.is_discarded()) {
        err = "environment is not valid JSON";
        return false;
    }
    auto loaded = chorm::load_env_json(doc);
    if (!loaded.ok()) {
        err = loaded.error();
        return false;
    }
    out = loaded.value();
    return true;
}

std::string parse_choreography_s(const std::string& text) {
    auto r = chorm::parse_choreography(text);
    if (!r.ok()) return err_doc(chorm::parse_error_to_json(r.error())).dump();
    json out{{"ok", true},
             {"ast", chorm::chor_to_json(r.value())},
             {"pretty", chorm::pretty(r.value())}};
    return out.dump();
}

std::string parse_global_types_s(const std::string& text) {
    auto r = chorm::parse_global_types(text);
    if (!r.ok()) return err_doc(chorm::parse_error_to_json(r.error())).dump();
    json protos = json::object();
    for (const auto& [name, g] : r.value())
        protos[name] = json{{"type", chorm::type_to_json(g)},
                            {"pretty", chorm::pretty(g)}};
    return json{{"ok", true}, {"protocols", protos}}.dump();
}

std::string merge_s(const std::string& text, const std::string& session,
                    const std::string& chan) {
    auto parsed = chorm::parse_choreography(text);
    if (!parsed.ok())
        return err_doc(chorm::parse_error_to_json(parsed.error())).dump();
    std::string k = session;
    if (k.empty()) {
        auto avoid = chorm::sessions_mentioned(parsed.value());
        k = chorm::fresh_session(chorm::SessChan{"k"}, avoid).value;
    }
    auto merged = chorm::merge(parsed.value(), chorm::SessChan{k},
                               chorm::PublicChan{chan});
    if (!merged.ok()) return err_doc(merged.error().message).dump();
    json out{{"ok", true},
             {"session", k},
             {"merged", chorm::pretty(merged.value())},
             {"ast", chorm::chor_to_json(merged.value())}};
    return out.dump();
}

std::string run_s(const std::string& text, const std::string& env_json,
                  int fuel) {
    auto parsed = chorm::parse_choreography(text);
    if (!parsed.ok())
        return err_doc(chorm::parse_error_to_json(parsed.error())).dump();
    chorm::LoadedEnv env;
    json env_err;
    if (!parse_env(env_json, env, env_err)) return err_doc(env_err).dump();
    chorm::Trace trace = chorm::run(parsed.value(), env.env, fuel);
    json out = chorm::trace_to_json(trace);
    out["ok"] = !trace.error.has_value();
    return out.dump();
}

std::string typecheck_s(const std::string& text, const std::string& protocols,
                        const std::string& env_json,
                        const std::vector<std::string>& binds) {
    auto parsed = chorm::parse_choreography(text);
    if (!parsed.ok())
        return err_doc(chorm::parse_error_to_json(parsed.error())).dump();
    auto types = chorm::parse_global_types(protocols);
    if (!types.ok())
        return err_doc(chorm::parse_error_to_json(types.error())).dump();
    chorm::LoadedEnv env;
    json env_err;
    if (!parse_env(env_json, env, env_err)) return err_doc(env_err).dump();

    auto wf = chorm::well_formed(parsed.value());
    if (!wf.empty()) {
        chorm::TypeReport report;
        report.ok = false;
        report.errors = wf;
        json out = chorm::type_report_to_json(report);
        out["ok"] = false;
        return out.dump();
    }
    auto gamma = chorm::auto_bind(parsed.value(), types.value(), binds);
    if (!gamma.ok()) return err_doc(gamma.error()).dump();
    chorm::TypeReport report =
        chorm::typecheck(gamma.value(), parsed.value(), {}, env.sorts);
    return chorm::type_report_to_json(report).dump();
}

std::string extract_s(const std::string& text, const std::string& env_json) {
    auto parsed = chorm::parse_choreography(text);
    if (!parsed.ok())
        return err_doc(chorm::parse_error_to_json(parsed.error())).dump();
    chorm::LoadedEnv env;
    json env_err;
    if (!parse_env(env_json, env, env_err)) return err_doc(env_err).dump();
    auto extracted = chorm::extract_type(parsed.value(), env.sorts);
    if (!extracted.ok()) {
        const auto& e = extracted.error();
        return err_doc(json{{"path", e.path}, {"message", e.message}}).dump();
    }
    json out{{"ok", true},
             {"type", chorm::type_to_json(extracted.value())},
             {"pretty", chorm::pretty(extracted.value())}};
    return out.dump();
}

std::string mesh_s(const std::string& candidate, const std::string& originals,
                   int depth, int base_len, int components) {
    auto cand = chorm::parse_global_types(candidate);
    if (!cand.ok())
        return err_doc(chorm::parse_error_to_json(cand.error())).dump();
    if (cand.value().empty())
        return err_doc("candidate text declares no protocols").dump();
    auto origs = chorm::parse_global_types(originals);
    if (!origs.ok())
        return err_doc(chorm::parse_error_to_json(origs.error())).dump();
    std::vector<chorm::TypePtr> gs;
    for (const auto& [name, g] : origs.value()) gs.push_back(g);
    if (gs.empty()) return err_doc("no original protocols supplied").dump();
    int m = components > 0 ? components : static_cast<int>(gs.size());
    chorm::MeshReport report = chorm::mesh_member(
        cand.value().begin()->second, gs, depth, base_len, m);
    json out = chorm::mesh_report_to_json(report);
    out["ok"] = true;
    return out.dump();
}

std::string verify_s(const std::string& text, const std::string& session,
                     const std::string& env_json, int depth) {
    auto parsed = chorm::parse_choreography(text);
    if (!parsed.ok())
        return err_doc(chorm::parse_error_to_json(parsed.error())).dump();
    chorm::LoadedEnv env;
    json env_err;
    if (!parse_env(env_json, env, env_err)) return err_doc(env_err).dump();
    std::string k = session;
    if (k.empty()) {
        auto avoid = chorm::sessions_mentioned(parsed.value());
        k = chorm::fresh_session(chorm::SessChan{"k"}, avoid).value;
    }
    chorm::Verdict sound = chorm::soundness_check(
        parsed.value(), chorm::SessChan{k}, env.env, depth);
    chorm::Verdict complete = chorm::completeness_check(
        parsed.value(), chorm::SessChan{k}, env.env, depth);
    json out{{"ok", true},
             {"session", k},
             {"soundness", chorm::verdict_to_json(sound)},
             {"completeness", chorm::verdict_to_json(complete)}};
    return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "choreography toolkit: parse, type, run, merge, extract, mesh, "
              "verify";
    m.attr("__version__") = "0.1.0";

    m.def("parse_choreography", &parse_choreography_s, py::arg("text"),
          "Parse a choreography; returns a JSON string.");
    m.def("parse_global_types", &parse_global_types_s, py::arg("text"),
          "Parse protocol declarations; returns a JSON string.");
    m.def("merge", &merge_s, py::arg("text"), py::arg("session") = "",
          py::arg("chan") = "c",
          "Collapse all sessions onto one fresh session.");
    m.def("run", &run_s, py::arg("text"), py::arg("env_json") = "",
          py::arg("fuel") = 64, "Execute a choreography.");
    m.def("typecheck", &typecheck_s, py::arg("text"), py::arg("protocols"),
          py::arg("env_json") = "",
          py::arg("binds") = std::vector<std::string>{},
          "Typecheck a choreography against protocol declarations.");
    m.def("extract", &extract_s, py::arg("text"), py::arg("env_json") = "",
          "Extract the global type of a single-session choreography.");
    m.def("mesh", &mesh_s, py::arg("candidate"), py::arg("originals"),
          py::arg("depth") = 8, py::arg("base") = 5, py::arg("components") = 0,
          "Bounded mesh membership of a candidate global type.");
    m.def("verify", &verify_s, py::arg("text"), py::arg("session") = "",
          py::arg("env_json") = "", py::arg("depth") = 12,
          "Bounded soundness and completeness of the merge transformation.");
}
