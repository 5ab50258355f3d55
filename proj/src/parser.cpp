#include "chorm/parser.hpp"

#include <cctype>

#include "chorm/ast_ops.hpp"

namespace chorm {

std::string ParseError::to_string() const {
    std::string out = std::to_string(line) + ":" + std::to_string(col) + ": " + message;
    if (!expected.empty()) {
        out += " (expected ";
        for (size_t i = 0; i < expected.size(); ++i) {
            if (i) out += " or ";
            out += expected[i];
        }
        out += ")";
    }
    return out;
}

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Str,      // "..."
    FileTag,  // #"..."
    Semi,     // ;
    Comma,
    Dot,
    Colon,
    At,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Lt,
    Gt,
    Arrow,   // ->
    EqEq,    // ==
    Plus,    // +
    Concat,  // ++
};

const char* tok_name(Tok t) {
    switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Str: return "string literal";
    case Tok::FileTag: return "file literal";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::At: return "'@'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Arrow: return "'->'";
    case Tok::EqEq: return "'=='";
    case Tok::Plus: return "'+'";
    case Tok::Concat: return "'++'";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string text;
    std::int64_t num = 0;
    int line = 1;
    int col = 1;
};

struct LexFail {
    ParseError err;
};

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t j = 0; j < n; ++j) {
            if (src[i + j] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    auto fail = [&](const std::string& msg) { throw LexFail{{line, col, msg, {}}}; };
    auto push = [&](Tok k, std::string text, std::int64_t num = 0) {
        out.push_back({k, std::move(text), num, line, col});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            while (j < src.size() && src[j] == '\'') ++j;
            push(Tok::Ident, src.substr(i, j - i));
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            size_t j = i + (c == '-' ? 1 : 0);
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            std::string text = src.substr(i, j - i);
            push(Tok::Int, text, std::stoll(text));
            advance(j - i);
            continue;
        }
        if (c == '"' || (c == '#' && i + 1 < src.size() && src[i + 1] == '"')) {
            bool is_file = c == '#';
            size_t j = i + (is_file ? 2 : 1);
            std::string text;
            while (j < src.size() && src[j] != '"') {
                if (src[j] == '\\' && j + 1 < src.size()) ++j;
                text += src[j++];
            }
            if (j >= src.size()) fail("unterminated string literal");
            push(is_file ? Tok::FileTag : Tok::Str, text);
            advance(j + 1 - i);
            continue;
        }
        switch (c) {
        case ';': push(Tok::Semi, ";"); advance(1); continue;
        case ',': push(Tok::Comma, ","); advance(1); continue;
        case '.': push(Tok::Dot, "."); advance(1); continue;
        case ':': push(Tok::Colon, ":"); advance(1); continue;
        case '@': push(Tok::At, "@"); advance(1); continue;
        case '[': push(Tok::LBrack, "["); advance(1); continue;
        case ']': push(Tok::RBrack, "]"); advance(1); continue;
        case '{': push(Tok::LBrace, "{"); advance(1); continue;
        case '}': push(Tok::RBrace, "}"); advance(1); continue;
        case '(': push(Tok::LParen, "("); advance(1); continue;
        case ')': push(Tok::RParen, ")"); advance(1); continue;
        case '<': push(Tok::Lt, "<"); advance(1); continue;
        case '>': push(Tok::Gt, ">"); advance(1); continue;
        case '-':
            if (i + 1 < src.size() && src[i + 1] == '>') {
                push(Tok::Arrow, "->");
                advance(2);
                continue;
            }
            fail("stray '-'");
            continue;
        case '=':
            if (i + 1 < src.size() && src[i + 1] == '=') {
                push(Tok::EqEq, "==");
                advance(2);
                continue;
            }
            fail("stray '=' (did you mean '==')");
            continue;
        case '+':
            if (i + 1 < src.size() && src[i + 1] == '+') {
                push(Tok::Concat, "++");
                advance(2);
                continue;
            }
            push(Tok::Plus, "+");
            advance(1);
            continue;
        default: fail(std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", 0, line, col});
    return out;
}

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {"start", "com",  "sel", "if",   "then",     "else", "rec",
                                               "on",    "as",   "over", "new",  "protocol", "end",  "true",
                                               "false"};
    return words;
}

struct ParseFail {
    ParseError err;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(int ahead = 0) const {
        size_t i = pos_ + static_cast<size_t>(ahead);
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_kw(const char* kw) const { return at(Tok::Ident) && peek().text == kw; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(std::string msg, std::vector<std::string> expected = {}) const {
        const Token& t = peek();
        throw ParseFail{{t.line, t.col, std::move(msg), std::move(expected)}};
    }

    Token expect(Tok k) {
        if (!at(k)) fail(std::string("found ") + describe(peek()), {tok_name(k)});
        return next();
    }
    void expect_kw(const char* kw) {
        if (!at_kw(kw)) fail(std::string("found ") + describe(peek()), {std::string("'") + kw + "'"});
        next();
    }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::Ident || t.kind == Tok::Int) return "'" + t.text + "'";
        return tok_name(t.kind);
    }

    std::string ident(const char* what) {
        if (!at(Tok::Ident)) fail(std::string("found ") + describe(peek()), {what});
        if (reserved_words().count(peek().text))
            fail("reserved word '" + peek().text + "' used as " + what, {what});
        return next().text;
    }

    bool done() const { return at(Tok::End); }

    // ----------------------------------------------------------- choreography

    Participant participant() {
        ThreadId t{ident("thread name")};
        expect(Tok::LBrack);
        RoleName r{ident("role name")};
        expect(Tok::RBrack);
        return {t, r};
    }

    ExprPtr primary() {
        if (at_kw("true")) { next(); return lit(Value{true}); }
        if (at_kw("false")) { next(); return lit(Value{false}); }
        if (at(Tok::Int)) return lit(Value{next().num});
        if (at(Tok::Str)) return lit(Value{next().text});
        if (at(Tok::FileTag)) return lit(Value{FileBytes{next().text}});
        if (at(Tok::LParen)) {
            next();
            ExprPtr e = expr();
            expect(Tok::RParen);
            return e;
        }
        if (at(Tok::Ident)) {
            std::string name = ident("expression");
            if (at(Tok::LParen)) {
                next();
                std::vector<ExprPtr> args;
                if (!at(Tok::RParen)) {
                    args.push_back(expr());
                    while (at(Tok::Comma)) {
                        next();
                        args.push_back(expr());
                    }
                }
                expect(Tok::RParen);
                return call(name, std::move(args));
            }
            return var(VarName{name});
        }
        fail(std::string("found ") + describe(peek()), {"expression"});
    }

    ExprPtr expr() {
        ExprPtr lhs = primary();
        if (at(Tok::EqEq)) { next(); return binop(BinOp::Eq, lhs, primary()); }
        if (at(Tok::Plus)) { next(); return binop(BinOp::Add, lhs, primary()); }
        if (at(Tok::Concat)) { next(); return binop(BinOp::Concat, lhs, primary()); }
        return lhs;
    }

    Eta eta() {
        if (at_kw("start")) {
            next();
            std::vector<Participant> parts;
            parts.push_back(participant());
            expect(Tok::Comma); // at least two participants
            parts.push_back(participant());
            while (at(Tok::Comma)) {
                next();
                parts.push_back(participant());
            }
            expect_kw("on");
            PublicChan a{ident("public channel")};
            expect_kw("as");
            SessChan k{ident("session channel")};
            return StartEta{std::move(parts), std::move(a), std::move(k)};
        }
        if (at_kw("com")) {
            next();
            Participant sender = participant();
            expect(Tok::Dot);
            ExprPtr e = expr();
            expect(Tok::Arrow);
            Participant receiver = participant();
            expect(Tok::Dot);
            VarName x{ident("variable")};
            expect_kw("over");
            SessChan k{ident("session channel")};
            return ComEta{sender, std::move(e), receiver, std::move(x), std::move(k)};
        }
        // sel
        next();
        Participant from = participant();
        expect(Tok::Arrow);
        Participant to = participant();
        expect(Tok::Colon);
        Label l{ident("label")};
        expect_kw("over");
        SessChan k{ident("session channel")};
        return SelEta{from, to, std::move(k), std::move(l)};
    }

    ChorPtr chor() {
        if (at(Tok::Int) && peek().num == 0) {
            next();
            return inact();
        }
        if (at_kw("if")) {
            next();
            ExprPtr guard = expr();
            expect(Tok::At);
            ThreadId t{ident("thread name")};
            expect_kw("then");
            ChorPtr then_branch = chor();
            expect_kw("else");
            ChorPtr else_branch = chor();
            return cond(std::move(t), std::move(guard), std::move(then_branch), std::move(else_branch));
        }
        if (at_kw("rec")) {
            next();
            ChorRecVar x{ident("recursion variable")};
            expect(Tok::LBrace);
            ChorPtr body = chor();
            expect(Tok::RBrace);
            return rec(std::move(x), std::move(body));
        }
        if (at(Tok::LParen)) {
            next();
            expect_kw("new");
            SessChan k{ident("session channel")};
            expect(Tok::RParen);
            return res(std::move(k), chor());
        }
        if (at_kw("start") || at_kw("com") || at_kw("sel")) {
            Eta head = eta();
            if (at(Tok::Semi)) {
                next();
                return seq(std::move(head), chor());
            }
            return seq(std::move(head), inact()); // trailing "; 0" omitted
        }
        if (at(Tok::Ident)) return rec_call(ChorRecVar{ident("recursion variable")});
        fail(std::string("found ") + describe(peek()),
             {"'0'", "'if'", "'rec'", "'(new'", "'start'", "'com'", "'sel'", "recursion variable"});
    }

    // ----------------------------------------------------------------- types

    Sort sort() {
        if (!at(Tok::Ident)) fail(std::string("found ") + describe(peek()), {"sort"});
        Sort s;
        if (!sort_from_name(peek().text, s))
            fail("unknown sort '" + peek().text + "'", {"'bool'", "'int'", "'string'", "'file'"});
        next();
        return s;
    }

    TypePtr gtype() {
        if (at_kw("end")) {
            next();
            return tend();
        }
        if (at_kw("rec")) {
            next();
            TypeRecVar t{ident("type variable")};
            expect(Tok::Dot);
            return trec(std::move(t), gtype());
        }
        std::string first = ident("role or type variable");
        if (!at(Tok::Arrow)) return tvar(TypeRecVar{first});
        next();
        const Token& at_to = peek();
        RoleName to{ident("role name")};
        if (RoleName{first} == to)
            throw ParseFail{{at_to.line, at_to.col, "role " + first + " messages itself", {}}};
        if (at(Tok::Colon)) {
            next();
            expect(Tok::Lt);
            Sort s = sort();
            expect(Tok::Gt);
            TypePtr cont = tend();
            if (at(Tok::Semi)) {
                next();
                cont = gtype();
            }
            return tcom(RoleName{first}, to, s, std::move(cont));
        }
        expect(Tok::LBrace);
        std::map<Label, TypePtr> branches;
        while (true) {
            const Token& lt = peek();
            Label l{ident("label")};
            if (branches.count(l))
                throw ParseFail{{lt.line, lt.col, "duplicate branch label " + l.value, {}}};
            expect(Tok::Colon);
            branches[l] = gtype();
            if (at(Tok::Comma)) {
                next();
                continue;
            }
            break;
        }
        expect(Tok::RBrace);
        return tchoice(RoleName{first}, to, std::move(branches));
    }

    std::map<std::string, TypePtr> protocols() {
        std::map<std::string, TypePtr> out;
        expect_kw("protocol");
        while (true) {
            const Token& nt = peek();
            std::string name = ident("protocol name");
            expect(Tok::LBrace);
            TypePtr g = gtype();
            expect(Tok::RBrace);
            if (!out.emplace(name, g).second)
                throw ParseFail{{nt.line, nt.col, "duplicate protocol name " + name, {}}};
            if (!type_closed(g))
                throw ParseFail{{nt.line, nt.col, "protocol " + name + " has an unbound type variable", {}}};
            if (!type_contractive(g))
                throw ParseFail{{nt.line, nt.col, "protocol " + name + " is non-contractive", {}}};
            if (done()) break;
            expect_kw("protocol");
        }
        return out;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
};

} // namespace

Result<ChorPtr, ParseError> parse_choreography(const std::string& text) {
    try {
        Parser p(lex(text));
        ChorPtr c = p.chor();
        if (!p.done())
            p.fail("trailing input after choreography", {"end of input"});
        return c;
    } catch (const LexFail& f) {
        return f.err;
    } catch (const ParseFail& f) {
        return f.err;
    }
}

Result<std::map<std::string, TypePtr>, ParseError> parse_global_types(const std::string& text) {
    try {
        Parser p(lex(text));
        auto out = p.protocols();
        return out;
    } catch (const LexFail& f) {
        return f.err;
    } catch (const ParseFail& f) {
        return f.err;
    }
}

Result<ExprPtr, ParseError> parse_expr(const std::string& text) {
    try {
        Parser p(lex(text));
        ExprPtr e = p.expr();
        if (!p.done()) p.fail("trailing input after expression", {"end of input"});
        return e;
    } catch (const LexFail& f) {
        return f.err;
    } catch (const ParseFail& f) {
        return f.err;
    }
}

} // namespace chorm
