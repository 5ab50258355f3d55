#include "chorm/printer.hpp"

#include <sstream>

namespace chorm {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

void print_expr(const ExprPtr& e, std::string& out, bool parens) {
    std::visit(overload{
                   [&](const LitExpr& n) {
                       std::visit(overload{
                                      [&](bool b) { out += b ? "true" : "false"; },
                                      [&](std::int64_t i) { out += std::to_string(i); },
                                      [&](const std::string& s) { out += "\"" + escape(s) + "\""; },
                                      [&](const FileBytes& f) { out += "#\"" + escape(f.bytes) + "\""; },
                                  },
                                  n.value);
                   },
                   [&](const VarExpr& n) { out += n.name.value; },
                   [&](const CallExpr& n) {
                       out += n.fn + "(";
                       for (size_t i = 0; i < n.args.size(); ++i) {
                           if (i) out += ", ";
                           print_expr(n.args[i], out, false);
                       }
                       out += ")";
                   },
                   [&](const BinOpExpr& n) {
                       if (parens) out += "(";
                       print_expr(n.lhs, out, true);
                       out += std::string(" ") + binop_name(n.op) + " ";
                       print_expr(n.rhs, out, true);
                       if (parens) out += ")";
                   },
               },
               e->node);
}

std::string participant(const Participant& p) { return p.thread.value + "[" + p.role.value + "]"; }

std::string eta_text(const Eta& e) {
    return std::visit(overload{
                          [&](const StartEta& s) {
                              std::string out = "start ";
                              for (size_t i = 0; i < s.participants.size(); ++i) {
                                  if (i) out += ", ";
                                  out += participant(s.participants[i]);
                              }
                              out += " on " + s.chan.value + " as " + s.session.value;
                              return out;
                          },
                          [&](const ComEta& m) {
                              std::string out = "com " + participant(m.sender) + ".";
                              print_expr(m.expr, out, true);
                              out += " -> " + participant(m.receiver) + "." + m.bind_var.value;
                              out += " over " + m.session.value;
                              return out;
                          },
                          [&](const SelEta& s) {
                              return "sel " + participant(s.from) + " -> " + participant(s.to) + " : " +
                                     s.label.value + " over " + s.session.value;
                          },
                      },
                      e);
}

void print_chor(const ChorPtr& c, std::string& out, int indent) {
    const std::string pad(static_cast<size_t>(indent) * 2, ' ');
    std::visit(overload{
                   [&](const SeqNode& n) {
                       out += pad + eta_text(n.head);
                       if (std::holds_alternative<InactNode>(n.cont->node)) return; // trailing "; 0" omitted
                       out += ";\n";
                       print_chor(n.cont, out, indent);
                   },
                   [&](const CondNode& n) {
                       out += pad + "if ";
                       print_expr(n.guard, out, false);
                       out += "@" + n.at.value + " then\n";
                       print_chor(n.then_branch, out, indent + 1);
                       out += "\n" + pad + "else\n";
                       print_chor(n.else_branch, out, indent + 1);
                   },
                   [&](const RecNode& n) {
                       out += pad + "rec " + n.var.value + " {\n";
                       print_chor(n.body, out, indent + 1);
                       out += "\n" + pad + "}";
                   },
                   [&](const CallNode& n) { out += pad + n.var.value; },
                   [&](const ResNode& n) {
                       out += pad + "(new " + n.session.value + ")\n";
                       print_chor(n.body, out, indent);
                   },
                   [&](const InactNode&) { out += pad + "0"; },
               },
               c->node);
}

void print_type(const TypePtr& g, std::string& out, int indent) {
    const std::string pad(static_cast<size_t>(indent) * 2, ' ');
    std::visit(overload{
                   [&](const ComType& n) {
                       out += pad + n.from.value + " -> " + n.to.value + " : <" + sort_name(n.sort) + ">";
                       if (std::holds_alternative<EndType>(n.cont->node)) return; // "; end" omitted
                       out += ";\n";
                       print_type(n.cont, out, indent);
                   },
                   [&](const ChoiceType& n) {
                       out += pad + n.from.value + " -> " + n.to.value + " {\n";
                       size_t i = 0;
                       for (const auto& [l, b] : n.branches) {
                           out += pad + "  " + l.value + ":\n";
                           print_type(b, out, indent + 2);
                           if (++i < n.branches.size()) out += ",";
                           out += "\n";
                       }
                       out += pad + "}";
                   },
                   [&](const EndType&) { out += pad + "end"; },
                   [&](const RecType& n) {
                       out += pad + "rec " + n.var.value + " .\n";
                       print_type(n.body, out, indent);
                   },
                   [&](const TypeVar& n) { out += pad + n.var.value; },
               },
               g->node);
}

} // namespace

std::string pretty(const ChorPtr& c) {
    std::string out;
    print_chor(c, out, 0);
    return out;
}

std::string pretty(const TypePtr& g) {
    std::string out;
    print_type(g, out, 0);
    return out;
}

std::string pretty(const ExprPtr& e) {
    std::string out;
    print_expr(e, out, false);
    return out;
}

std::string pretty(const Eta& e) { return eta_text(e); }

std::string pretty_protocols(const std::map<std::string, TypePtr>& protocols) {
    std::string out;
    for (const auto& [name, g] : protocols) {
        if (!out.empty()) out += "\n";
        out += "protocol " + name + " {\n";
        std::string body;
        print_type(g, body, 1);
        out += body + "\n}\n";
    }
    return out;
}

} // namespace chorm
