#include "chorm/json_io.hpp"

#include <fstream>
#include <sstream>

#include "chorm/printer.hpp"

namespace chorm {

// ----------------------------------------------------------------- values ----

json value_to_json(const Value& v) {
    json out;
    out["sort"] = sort_name(value_sort(v));
    std::visit(overload{
                   [&](bool b) { out["value"] = b; },
                   [&](std::int64_t i) { out["value"] = i; },
                   [&](const std::string& s) { out["value"] = s; },
                   [&](const FileBytes& f) { out["value"] = f.bytes; },
               },
               v);
    return out;
}

json expr_to_json(const ExprPtr& e) {
    return std::visit(
        overload{
            [&](const LitExpr& n) { return json{{"expr", "lit"}, {"value", value_to_json(n.value)}}; },
            [&](const VarExpr& n) { return json{{"expr", "var"}, {"name", n.name.value}}; },
            [&](const CallExpr& n) {
                json args = json::array();
                for (const auto& a : n.args) args.push_back(expr_to_json(a));
                return json{{"expr", "call"}, {"fn", n.fn}, {"args", std::move(args)}};
            },
            [&](const BinOpExpr& n) {
                const char* op = n.op == BinOp::Eq ? "eq" : n.op == BinOp::Add ? "add" : "concat";
                return json{{"expr", "binop"}, {"op", op}, {"lhs", expr_to_json(n.lhs)}, {"rhs", expr_to_json(n.rhs)}};
            },
        },
        e->node);
}

namespace {

json participant_to_json(const Participant& p) {
    return json{{"thread", p.thread.value}, {"role", p.role.value}};
}

json eta_to_json(const Eta& e) {
    return std::visit(
        overload{
            [&](const StartEta& s) {
                json parts = json::array();
                for (const auto& p : s.participants) parts.push_back(participant_to_json(p));
                return json{{"eta", "start"},
                            {"participants", std::move(parts)},
                            {"chan", s.chan.value},
                            {"session", s.session.value}};
            },
            [&](const ComEta& m) {
                return json{{"eta", "com"},
                            {"sender", participant_to_json(m.sender)},
                            {"expr", expr_to_json(m.expr)},
                            {"receiver", participant_to_json(m.receiver)},
                            {"var", m.bind_var.value},
                            {"session", m.session.value}};
            },
            [&](const SelEta& s) {
                return json{{"eta", "sel"},
                            {"from", participant_to_json(s.from)},
                            {"to", participant_to_json(s.to)},
                            {"label", s.label.value},
                            {"session", s.session.value}};
            },
        },
        e);
}

} // namespace

json chor_to_json(const ChorPtr& c) {
    return std::visit(
        overload{
            [&](const SeqNode& n) {
                return json{{"node", "seq"}, {"head", eta_to_json(n.head)}, {"cont", chor_to_json(n.cont)}};
            },
            [&](const CondNode& n) {
                return json{{"node", "cond"},
                            {"at", n.at.value},
                            {"guard", expr_to_json(n.guard)},
                            {"then", chor_to_json(n.then_branch)},
                            {"else", chor_to_json(n.else_branch)}};
            },
            [&](const RecNode& n) {
                return json{{"node", "rec"}, {"var", n.var.value}, {"body", chor_to_json(n.body)}};
            },
            [&](const CallNode& n) { return json{{"node", "call"}, {"var", n.var.value}}; },
            [&](const ResNode& n) {
                return json{{"node", "res"}, {"session", n.session.value}, {"body", chor_to_json(n.body)}};
            },
            [&](const InactNode&) { return json{{"node", "inact"}}; },
        },
        c->node);
}

json type_to_json(const TypePtr& g) {
    return std::visit(
        overload{
            [&](const ComType& t) {
                return json{{"type", "com"},
                            {"from", t.from.value},
                            {"to", t.to.value},
                            {"sort", sort_name(t.sort)},
                            {"cont", type_to_json(t.cont)}};
            },
            [&](const ChoiceType& t) {
                json branches = json::object();
                for (const auto& [l, b] : t.branches) branches[l.value] = type_to_json(b);
                return json{{"type", "choice"}, {"from", t.from.value}, {"to", t.to.value},
                            {"branches", std::move(branches)}};
            },
            [&](const EndType&) { return json{{"type", "end"}}; },
            [&](const RecType& t) {
                return json{{"type", "rec"}, {"var", t.var.value}, {"body", type_to_json(t.body)}};
            },
            [&](const TypeVar& t) { return json{{"type", "var"}, {"var", t.var.value}}; },
        },
        g->node);
}

json parse_error_to_json(const ParseError& e) {
    return json{{"line", e.line}, {"col", e.col}, {"message", e.message}, {"expected", e.expected}};
}

// ----------------------------------------------------------------- events ----

json event_to_json(const Event& ev) {
    return std::visit(
        overload{
            [&](const EvStart& e) {
                json parts = json::array();
                for (const auto& p : e.participants) parts.push_back(participant_to_json(p));
                return json{{"kind", "start"},
                            {"participants", std::move(parts)},
                            {"chan", e.chan.value},
                            {"session", e.session.value}};
            },
            [&](const EvCom& e) {
                return json{{"kind", "com"},
                            {"from", participant_to_json(e.sender)},
                            {"to", participant_to_json(e.receiver)},
                            {"value", value_to_json(e.value)},
                            {"var", e.var.value},
                            {"session", e.session.value}};
            },
            [&](const EvSel& e) {
                return json{{"kind", "sel"},
                            {"from", participant_to_json(e.from)},
                            {"to", participant_to_json(e.to)},
                            {"label", e.label.value},
                            {"session", e.session.value}};
            },
            [&](const EvCond& e) { return json{{"kind", "cond"}, {"at", e.at.value}, {"result", e.result}}; },
        },
        ev);
}

json trace_to_json(const Trace& t) {
    json steps = json::array();
    for (const auto& s : t.steps)
        steps.push_back(json{{"event", event_to_json(s.event)}, {"after", pretty(s.after)}});
    json out{{"steps", std::move(steps)},
             {"startCount", t.start_count},
             {"fuelExhausted", t.fuel_exhausted}};
    if (t.error)
        out["error"] = json{{"message", t.error->error.message}, {"at", t.error->path}};
    else
        out["error"] = nullptr;
    return out;
}

json type_report_to_json(const TypeReport& r) {
    json errs = json::array();
    for (const auto& d : r.errors) errs.push_back(json{{"path", d.path}, {"message", d.message}});
    json completed = json::array();
    for (const auto& k : r.completed_sessions) completed.push_back(k.value);
    return json{{"ok", r.ok}, {"errors", std::move(errs)}, {"completedSessions", std::move(completed)}};
}

json path_event_to_json(const PathEvent& e) {
    return std::visit(
        overload{
            [&](const PCom& c) {
                return json{{"kind", "com"}, {"from", c.from.value}, {"to", c.to.value},
                            {"sort", sort_name(c.sort)}};
            },
            [&](const PSel& s) {
                return json{{"kind", "sel"}, {"from", s.from.value}, {"to", s.to.value},
                            {"label", s.label.value}};
            },
        },
        e);
}

json word_to_json(const Word& w) {
    json out = json::array();
    for (const auto& e : w) out.push_back(path_event_to_json(e));
    return out;
}

json mesh_report_to_json(const MeshReport& r) {
    json out{{"member", r.member},
             {"checkedPaths", r.checked_paths},
             {"bounds", json{{"D", r.depth_bound}, {"L", r.base_bound}, {"M", r.component_bound}}}};
    out["failing"] = r.failing ? word_to_json(*r.failing) : json(nullptr);
    if (r.witness) {
        json comps = json::array();
        for (const auto& c : r.witness->components) {
            json ren = json::object();
            for (const auto& [from, to] : c.renaming) ren[from.value] = to.value;
            json words = json::array();
            for (const auto& w : c.words) words.push_back(word_to_json(w));
            comps.push_back(json{{"original", c.original_index},
                                 {"renaming", std::move(ren)},
                                 {"words", std::move(words)}});
        }
        out["witness"] = json{{"coloring", r.witness->coloring}, {"components", std::move(comps)}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

json verdict_to_json(const Verdict& v) {
    json steps = json::array();
    for (const auto& s : v.steps)
        steps.push_back(json{{"kind", s.kind == VerdictStep::Kind::Matched ? "matched" : "pure-start"},
                             {"event", event_to_json(s.event)}});
    json out{{"property", v.property == Property::Soundness ? "soundness" : "completeness"},
             {"passed", v.passed},
             {"depthChecked", v.depth_checked},
             {"steps", std::move(steps)}};
    if (v.counterexample) {
        json trace = json::array();
        for (const auto& e : v.counterexample->trace) trace.push_back(event_to_json(e));
        json step_taken = v.counterexample->step_taken ? event_to_json(*v.counterexample->step_taken)
                                                       : json(nullptr);
        out["counterexample"] = json{{"stateBefore", v.counterexample->state_before},
                                     {"stepTaken", std::move(step_taken)},
                                     {"explanation", v.counterexample->explanation},
                                     {"trace", std::move(trace)}};
    } else {
        out["counterexample"] = nullptr;
    }
    return out;
}

// -------------------------------------------------------------- env loading ----

namespace {

Result<Sort, std::string> sort_from_json_name(const std::string& s) {
    Sort out = Sort::Bool;
    if (sort_from_name(s, out)) return out;
    return "unknown sort \"" + s + "\"";
}

Result<Value, std::string> value_from_json(const json& j, Sort want, const std::string& where) {
    switch (want) {
    case Sort::Bool:
        if (j.is_boolean()) return Value{j.get<bool>()};
        break;
    case Sort::Int:
        if (j.is_number_integer()) return Value{j.get<std::int64_t>()};
        break;
    case Sort::String:
        if (j.is_string()) return Value{j.get<std::string>()};
        break;
    case Sort::File:
        if (j.is_string()) return Value{FileBytes{j.get<std::string>()}};
        break;
    }
    return where + ": expected a " + std::string(sort_name(want)) + " value, got " + j.dump();
}

} // namespace

Result<LoadedEnv, std::string> load_env_json(const json& j) {
    LoadedEnv out;
    if (!j.is_object()) return std::string("environment document must be a JSON object");

    if (j.contains("functions")) {
        if (!j["functions"].is_object()) return std::string("\"functions\" must be an object");
        for (const auto& [name, fn] : j["functions"].items()) {
            if (!fn.contains("sig") || !fn["sig"].is_array())
                return "function " + name + " needs a \"sig\" array";
            Signature sig{{}, Sort::Bool};
            bool after_arrow = false;
            int rets = 0;
            for (const auto& tok : fn["sig"]) {
                if (!tok.is_string()) return "function " + name + ": sig entries must be strings";
                std::string s = tok.get<std::string>();
                if (s == "->") {
                    if (after_arrow) return "function " + name + ": sig has two arrows";
                    after_arrow = true;
                    continue;
                }
                auto srt = sort_from_json_name(s);
                if (!srt.ok()) return "function " + name + ": " + srt.error();
                if (after_arrow) {
                    sig.ret = srt.value();
                    ++rets;
                } else {
                    sig.args.push_back(srt.value());
                }
            }
            if (rets != 1) return "function " + name + ": sig needs exactly one return sort after \"->\"";
            BuiltinFn f{sig, {}};
            if (fn.contains("values")) {
                if (!fn["values"].is_array()) return "function " + name + ": \"values\" must be an array";
                for (const auto& v : fn["values"]) {
                    auto val = value_from_json(v, sig.ret, "function " + name);
                    if (!val.ok()) return val.error();
                    f.values.push_back(val.value());
                }
            }
            if (f.values.empty()) return "function " + name + " needs a non-empty \"values\" list";
            out.env.functions[name] = std::move(f);
            out.sorts.sigs[name] = sig;
        }
    }

    if (j.contains("bindings")) {
        if (!j["bindings"].is_object()) return std::string("\"bindings\" must be an object");
        for (const auto& [key, b] : j["bindings"].items()) {
            auto dot = key.find('.');
            if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
                return "binding key \"" + key + "\" must look like thread.var";
            ThreadId thread{key.substr(0, dot)};
            VarName var{key.substr(dot + 1)};
            if (!b.contains("sort") || !b["sort"].is_string())
                return "binding " + key + " needs a \"sort\"";
            auto srt = sort_from_json_name(b["sort"].get<std::string>());
            if (!srt.ok()) return "binding " + key + ": " + srt.error();
            if (!b.contains("value")) return "binding " + key + " needs a \"value\"";
            auto val = value_from_json(b["value"], srt.value(), "binding " + key);
            if (!val.ok()) return val.error();
            out.env.bindings[{thread, var}] = val.value();
            out.sorts.vars[{thread, var}] = srt.value();
        }
    }

    return out;
}

Result<LoadedEnv, std::string> load_env_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return "cannot open environment file " + path;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) return "environment file " + path + " is not valid JSON";
    return load_env_json(j);
}

} // namespace chorm
