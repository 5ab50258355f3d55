#pragma once

#include <map>
#include <string>

#include "chorm/ast.hpp"

namespace chorm {

// Stable concrete syntax; parse(pretty(t)) is alpha_equal to t.
std::string pretty(const ChorPtr& c);
std::string pretty(const TypePtr& g);
std::string pretty(const ExprPtr& e);
std::string pretty(const Eta& e);

// protocol blocks, one per entry, in map order
std::string pretty_protocols(const std::map<std::string, TypePtr>& protocols);

} // namespace chorm
