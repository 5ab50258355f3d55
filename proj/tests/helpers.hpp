// Doctest-flavoured conveniences on top of the shared fixtures: data file
// loading and parsing that REQUIREs success.
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <doctest.h>

#include "chorm/parser.hpp"
#include "fixtures.hpp"

namespace chorm::testing {

inline std::string read_data(const std::string& name) {
    std::ifstream in(data_path(name), std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing test data file: ", name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ChorPtr must_parse_chor(const std::string& text) {
    auto r = parse_choreography(text);
    REQUIRE_MESSAGE(r.ok(), (r.ok() ? std::string{} : r.error().to_string()));
    return r.value();
}

inline std::map<std::string, TypePtr> must_parse_types(const std::string& text) {
    auto r = parse_global_types(text);
    REQUIRE_MESSAGE(r.ok(), (r.ok() ? std::string{} : r.error().to_string()));
    return r.value();
}

inline ChorPtr chor_file(const std::string& name) {
    return must_parse_chor(read_data(name));
}

inline std::map<std::string, TypePtr> types_file(const std::string& name) {
    return must_parse_types(read_data(name));
}

} // namespace chorm::testing
