#pragma once

#include <map>
#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/result.hpp"

namespace chorm {

struct ParseError {
    int line = 0;
    int col = 0;
    std::string message;
    std::vector<std::string> expected; // token spellings that would have been accepted

    std::string to_string() const;
};

// Whitespace-insensitive, //-comments. A trailing "; 0" after the final
// prefix may be omitted.
Result<ChorPtr, ParseError> parse_choreography(const std::string& text);

// One or more "protocol Name { G }" blocks. Rejects duplicate protocol
// names, duplicate branch labels, unbound type variables, self-messaging
// roles and non-contractive recursion.
Result<std::map<std::string, TypePtr>, ParseError> parse_global_types(const std::string& text);

// Single expression (used by tooling and tests).
Result<ExprPtr, ParseError> parse_expr(const std::string& text);

} // namespace chorm
