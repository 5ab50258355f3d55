#include "chorm/ast.hpp"

namespace chorm {

const char* sort_name(Sort s) {
    switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Int: return "int";
    case Sort::String: return "string";
    case Sort::File: return "file";
    }
    return "?";
}

bool sort_from_name(const std::string& name, Sort& out) {
    if (name == "bool") { out = Sort::Bool; return true; }
    if (name == "int") { out = Sort::Int; return true; }
    if (name == "string") { out = Sort::String; return true; }
    if (name == "file") { out = Sort::File; return true; }
    return false;
}

Sort value_sort(const Value& v) {
    return std::visit(overload{
                          [](bool) { return Sort::Bool; },
                          [](std::int64_t) { return Sort::Int; },
                          [](const std::string&) { return Sort::String; },
                          [](const FileBytes&) { return Sort::File; },
                      },
                      v);
}

std::string value_repr(const Value& v) {
    return std::visit(overload{
                          [](bool b) { return std::string(b ? "true" : "false"); },
                          [](std::int64_t n) { return std::to_string(n); },
                          [](const std::string& s) { return "\"" + s + "\""; },
                          [](const FileBytes& f) { return "#\"" + f.bytes + "\""; },
                      },
                      v);
}

ExprPtr lit(Value v) { return std::make_shared<const Expr>(Expr{LitExpr{std::move(v)}}); }
ExprPtr var(VarName x) { return std::make_shared<const Expr>(Expr{VarExpr{std::move(x)}}); }
ExprPtr call(std::string fn, std::vector<ExprPtr> args) {
    return std::make_shared<const Expr>(Expr{CallExpr{std::move(fn), std::move(args)}});
}
ExprPtr binop(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{BinOpExpr{op, std::move(lhs), std::move(rhs)}});
}

const char* binop_name(BinOp op) {
    switch (op) {
    case BinOp::Eq: return "==";
    case BinOp::Add: return "+";
    case BinOp::Concat: return "++";
    }
    return "?";
}

ChorPtr seq(Eta head, ChorPtr cont) {
    return std::make_shared<const Choreography>(Choreography{SeqNode{std::move(head), std::move(cont)}});
}
ChorPtr cond(ThreadId at, ExprPtr guard, ChorPtr then_branch, ChorPtr else_branch) {
    return std::make_shared<const Choreography>(
        Choreography{CondNode{std::move(at), std::move(guard), std::move(then_branch), std::move(else_branch)}});
}
ChorPtr rec(ChorRecVar x, ChorPtr body) {
    return std::make_shared<const Choreography>(Choreography{RecNode{std::move(x), std::move(body)}});
}
ChorPtr rec_call(ChorRecVar x) {
    return std::make_shared<const Choreography>(Choreography{CallNode{std::move(x)}});
}
ChorPtr res(SessChan k, ChorPtr body) {
    return std::make_shared<const Choreography>(Choreography{ResNode{std::move(k), std::move(body)}});
}
ChorPtr inact() {
    static const ChorPtr zero = std::make_shared<const Choreography>(Choreography{InactNode{}});
    return zero;
}

TypePtr tcom(RoleName from, RoleName to, Sort s, TypePtr cont) {
    return std::make_shared<const GlobalType>(GlobalType{ComType{std::move(from), std::move(to), s, std::move(cont)}});
}
TypePtr tchoice(RoleName from, RoleName to, std::map<Label, TypePtr> branches) {
    return std::make_shared<const GlobalType>(
        GlobalType{ChoiceType{std::move(from), std::move(to), std::move(branches)}});
}
TypePtr tend() {
    static const TypePtr end = std::make_shared<const GlobalType>(GlobalType{EndType{}});
    return end;
}
TypePtr trec(TypeRecVar t, TypePtr body) {
    return std::make_shared<const GlobalType>(GlobalType{RecType{std::move(t), std::move(body)}});
}
TypePtr tvar(TypeRecVar t) {
    return std::make_shared<const GlobalType>(GlobalType{TypeVar{std::move(t)}});
}

} // namespace chorm
