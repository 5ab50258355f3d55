#pragma once

#include <string>

#include <json.hpp>

#include "chorm/ast.hpp"
#include "chorm/parser.hpp"
#include "chorm/result.hpp"
#include "chorm/semantics.hpp"
#include "chorm/typealg.hpp"
#include "chorm/typing.hpp"
#include "chorm/verify.hpp"

namespace chorm {

using json = nlohmann::json;

json value_to_json(const Value& v);
json expr_to_json(const ExprPtr& e);
json chor_to_json(const ChorPtr& c);
json type_to_json(const TypePtr& g);
json parse_error_to_json(const ParseError& e);

json event_to_json(const Event& ev);
json trace_to_json(const Trace& t);
json type_report_to_json(const TypeReport& r);
json path_event_to_json(const PathEvent& e);
json word_to_json(const Word& w);
json mesh_report_to_json(const MeshReport& r);
json verdict_to_json(const Verdict& v);

// Scripted-builtin environment file: functions carry a signature and a
// cyclic value list, bindings give per-thread free-variable values.
struct LoadedEnv {
    BuiltinEnv env;
    SortEnv sorts;
};

Result<LoadedEnv, std::string> load_env_json(const json& j);
Result<LoadedEnv, std::string> load_env_file(const std::string& path);

} // namespace chorm
