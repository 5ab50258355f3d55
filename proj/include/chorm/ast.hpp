#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace chorm {

// ---------------------------------------------------------------- names ----
//
// Every identifier kind is its own nominal type: a session channel never
// compares against a public channel even when the spelling coincides, and
// mixing them up is a compile error rather than a late surprise.

template <class Tag>
struct Name {
    std::string value;

    Name() = default;
    explicit Name(std::string v) : value(std::move(v)) { assert(!value.empty()); }

    friend auto operator<=>(const Name&, const Name&) = default;
};

using ThreadId   = Name<struct ThreadTag>;     // runtime thread, e.g. c
using RoleName   = Name<struct RoleTag>;       // protocol role, e.g. C
using PublicChan = Name<struct PublicChanTag>; // shared service channel
using SessChan   = Name<struct SessChanTag>;   // session channel
using VarName    = Name<struct VarTag>;        // value variable
using Label      = Name<struct LabelTag>;      // branch label
using ChorRecVar = Name<struct ChorRecTag>;    // choreography recursion variable
using TypeRecVar = Name<struct TypeRecTag>;    // global-type recursion variable

// ---------------------------------------------------------------- sorts ----

enum class Sort { Bool, Int, String, File };

const char* sort_name(Sort s);
bool sort_from_name(const std::string& name, Sort& out);

// --------------------------------------------------------------- values ----

// File contents are opaque byte-strings; equality is byte equality.
struct FileBytes {
    std::string bytes;
    friend auto operator<=>(const FileBytes&, const FileBytes&) = default;
};

using Value = std::variant<bool, std::int64_t, std::string, FileBytes>;

Sort value_sort(const Value& v);
std::string value_repr(const Value& v); // debug/trace rendering

// ---------------------------------------------------------- expressions ----

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LitExpr {
    Value value;
};
struct VarExpr {
    VarName name;
};
struct CallExpr {
    std::string fn;
    std::vector<ExprPtr> args;
};

enum class BinOp { Eq, Add, Concat };

struct BinOpExpr {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Expr {
    std::variant<LitExpr, VarExpr, CallExpr, BinOpExpr> node;
};

ExprPtr lit(Value v);
ExprPtr var(VarName x);
ExprPtr call(std::string fn, std::vector<ExprPtr> args);
ExprPtr binop(BinOp op, ExprPtr lhs, ExprPtr rhs);
const char* binop_name(BinOp op);

// ------------------------------------------------------------- prefixes ----

struct Participant {
    ThreadId thread;
    RoleName role;
    friend auto operator<=>(const Participant&, const Participant&) = default;
};

// start t1[p1], ..., tn[pn] on a as k     (n >= 2; binds k in the continuation)
struct StartEta {
    std::vector<Participant> participants;
    PublicChan chan;
    SessChan session;
};

// com t1[p].e -> t2[q].x over k           (binds x in the continuation)
struct ComEta {
    Participant sender;
    ExprPtr expr;
    Participant receiver;
    VarName bind_var;
    SessChan session;
};

// sel t1[p] -> t2[q] : l over k
struct SelEta {
    Participant from;
    Participant to;
    SessChan session;
    Label label;
};

using Eta = std::variant<StartEta, ComEta, SelEta>;

// -------------------------------------------------------- choreographies ----

struct Choreography;
using ChorPtr = std::shared_ptr<const Choreography>;

struct SeqNode {
    Eta head;
    ChorPtr cont;
};
struct CondNode {
    ThreadId at;
    ExprPtr guard;
    ChorPtr then_branch;
    ChorPtr else_branch;
};
struct RecNode {
    ChorRecVar var;
    ChorPtr body;
};
struct CallNode {
    ChorRecVar var;
};
struct ResNode { // (nu k) body
    SessChan session;
    ChorPtr body;
};
struct InactNode {};

struct Choreography {
    std::variant<SeqNode, CondNode, RecNode, CallNode, ResNode, InactNode> node;
};

ChorPtr seq(Eta head, ChorPtr cont);
ChorPtr cond(ThreadId at, ExprPtr guard, ChorPtr then_branch, ChorPtr else_branch);
ChorPtr rec(ChorRecVar x, ChorPtr body);
ChorPtr rec_call(ChorRecVar x);
ChorPtr res(SessChan k, ChorPtr body);
ChorPtr inact();

// ---------------------------------------------------------- global types ----

struct GlobalType;
using TypePtr = std::shared_ptr<const GlobalType>;

struct ComType { // p -> q : <S>; cont
    RoleName from;
    RoleName to;
    Sort sort;
    TypePtr cont;
};
struct ChoiceType { // p -> q { l1: G1, ... }   branches keyed (and ordered) by label
    RoleName from;
    RoleName to;
    std::map<Label, TypePtr> branches;
};
struct EndType {};
struct RecType {
    TypeRecVar var;
    TypePtr body;
};
struct TypeVar {
    TypeRecVar var;
};

struct GlobalType {
    std::variant<ComType, ChoiceType, EndType, RecType, TypeVar> node;
};

TypePtr tcom(RoleName from, RoleName to, Sort s, TypePtr cont);
TypePtr tchoice(RoleName from, RoleName to, std::map<Label, TypePtr> branches);
TypePtr tend();
TypePtr trec(TypeRecVar t, TypePtr body);
TypePtr tvar(TypeRecVar t);

// Small helper for std::visit over variants.
template <class... Ts>
struct overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overload(Ts...) -> overload<Ts...>;

} // namespace chorm
