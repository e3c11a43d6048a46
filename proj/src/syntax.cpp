#include "cocofj/syntax.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <set>
#include <sstream>

namespace cocofj {

std::string Diagnostic::format(const std::string& file) const {
    std::ostringstream out;
    out << file << ':' << loc.line << ':' << loc.column << ": error";
    if (!rule.empty())
        out << " [" << rule << "]";
    out << ": " << message;
    return out.str();
}

// ---------------------------------------------------------------------------
// AST constructors and equality

ExprPtr makeVar(std::string name, SourceLoc loc) {
    return std::make_shared<Expr>(Expr{ExprKind::Var, loc, std::move(name), nullptr, {}});
}

ExprPtr makeThis(SourceLoc loc) {
    return std::make_shared<Expr>(Expr{ExprKind::This, loc, "", nullptr, {}});
}

ExprPtr makeFieldAccess(ExprPtr receiver, std::string field, SourceLoc loc) {
    return std::make_shared<Expr>(
        Expr{ExprKind::FieldAccess, loc, std::move(field), std::move(receiver), {}});
}

ExprPtr makeInvoke(ExprPtr receiver, std::string method, std::vector<ExprPtr> args,
                   SourceLoc loc) {
    return std::make_shared<Expr>(
        Expr{ExprKind::Invoke, loc, std::move(method), std::move(receiver), std::move(args)});
}

ExprPtr makeNew(ClassName cls, std::vector<ExprPtr> args, SourceLoc loc) {
    return std::make_shared<Expr>(
        Expr{ExprKind::New, loc, std::move(cls), nullptr, std::move(args)});
}

ExprPtr makeCast(ExprKind castKind, ClassName cls, ExprPtr operand, SourceLoc loc) {
    return std::make_shared<Expr>(
        Expr{castKind, loc, std::move(cls), std::move(operand), {}});
}

bool exprEquals(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size())
        return false;
    if ((a.receiver == nullptr) != (b.receiver == nullptr))
        return false;
    if (a.receiver && !exprEquals(*a.receiver, *b.receiver))
        return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!exprEquals(*a.args[i], *b.args[i]))
            return false;
    return true;
}

bool classDeclEquals(const ClassDecl& a, const ClassDecl& b) {
    if (a.name != b.name || a.superName != b.superName || a.fields != b.fields)
        return false;
    if (a.ctor.superParams != b.ctor.superParams || a.ctor.ownParams != b.ctor.ownParams)
        return false;
    if (a.methods.size() != b.methods.size())
        return false;
    for (size_t i = 0; i < a.methods.size(); ++i) {
        const MethodDecl& ma = a.methods[i];
        const MethodDecl& mb = b.methods[i];
        if (ma.returnType != mb.returnType || ma.name != mb.name || ma.params != mb.params)
            return false;
        if (!exprEquals(*ma.body, *mb.body))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Program tree

ProgramPtr makeLeaf(ClassDeclPtr decl) {
    return std::make_shared<ProgramNode>(ProgramNode{{}, std::move(decl)});
}

ProgramPtr makeGroup(std::vector<ProgramPtr> children) {
    return std::make_shared<ProgramNode>(ProgramNode{std::move(children), nullptr});
}

static void collectLeaves(const ProgramPtr& node, std::vector<ClassDeclPtr>& out) {
    if (!node)
        return;
    if (node->isLeaf()) {
        out.push_back(node->decl);
        return;
    }
    for (const ProgramPtr& child : node->children)
        collectLeaves(child, out);
}

std::vector<ClassDeclPtr> leaves(const ProgramPtr& node) {
    std::vector<ClassDeclPtr> out;
    collectLeaves(node, out);
    return out;
}

int treeDepth(const ProgramPtr& node) {
    if (!node || node->isLeaf())
        return 0;
    int deepest = 0;
    for (const ProgramPtr& child : node->children)
        deepest = std::max(deepest, treeDepth(child));
    return deepest + 1;
}

static ProgramPtr balanceSlice(const std::vector<ClassDeclPtr>& decls, size_t begin, size_t end,
                               int arity) {
    size_t count = end - begin;
    if (count == 1)
        return makeLeaf(decls[begin]);
    // Split into at most `arity` contiguous chunks of near-equal size.
    size_t chunks = std::min<size_t>(static_cast<size_t>(arity), count);
    std::vector<ProgramPtr> children;
    children.reserve(chunks);
    size_t base = count / chunks;
    size_t extra = count % chunks;
    size_t at = begin;
    for (size_t i = 0; i < chunks; ++i) {
        size_t take = base + (i < extra ? 1 : 0);
        children.push_back(balanceSlice(decls, at, at + take, arity));
        at += take;
    }
    return makeGroup(std::move(children));
}

ProgramPtr balance(const std::vector<ClassDeclPtr>& decls, int arity) {
    if (arity < 2)
        arity = 2;
    if (decls.empty())
        return makeGroup({});
    if (decls.size() == 1)
        return makeGroup({makeLeaf(decls[0])});
    return balanceSlice(decls, 0, decls.size(), arity);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
    Ident,
    Number, // only `0` is meaningful
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Dot,
    Assign,
    Bang,
    Question,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceLoc loc;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }
    const Token& peek2() {
        if (!hasNext_) {
            next_ = lex();
            hasNext_ = true;
        }
        return next_;
    }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        if (hasNext_) {
            current_ = next_;
            hasNext_ = false;
        } else {
            current_ = lex();
        }
    }

    Token lex() {
        skipTrivia();
        Token t;
        t.loc = {line_, column_};
        if (pos_ >= text_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                bump();
            t.kind = Tok::Ident;
            t.text = text_.substr(start, pos_ - start);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                bump();
            t.kind = Tok::Number;
            t.text = text_.substr(start, pos_ - start);
            return t;
        }
        bump();
        switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case ';': t.kind = Tok::Semi; break;
        case ',': t.kind = Tok::Comma; break;
        case '.': t.kind = Tok::Dot; break;
        case '=': t.kind = Tok::Assign; break;
        case '!': t.kind = Tok::Bang; break;
        case '?': t.kind = Tok::Question; break;
        default:
            t.kind = Tok::End;
            t.text = std::string(1, c);
            t.loc.column = -t.loc.column; // marks an unexpected character
            break;
        }
        return t;
    }

    void skipTrivia() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
    Token next_;
    bool hasNext_ = false;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    ParseResult program() {
        ParseResult result;
        std::vector<ClassDeclPtr> decls;
        std::set<ClassName> seen;
        while (lex_.peek().kind != Tok::End && errors_.empty()) {
            ClassDeclPtr decl = classDecl();
            if (!decl)
                break;
            if (decl->name == "Object")
                error(decl->loc, "class `Object` is built in and cannot be declared");
            else if (!seen.insert(decl->name).second)
                error(decl->loc, "duplicate class name `" + decl->name + "`");
            decls.push_back(std::move(decl));
        }
        result.errors = std::move(errors_);
        if (result.errors.empty()) {
            std::vector<ProgramPtr> children;
            children.reserve(decls.size());
            for (ClassDeclPtr& d : decls)
                children.push_back(makeLeaf(std::move(d)));
            result.program = makeGroup(std::move(children));
        }
        return result;
    }

    ParseResult expression() {
        ParseResult result;
        ExprPtr e = expr();
        if (errors_.empty() && lex_.peek().kind != Tok::End)
            error(lex_.peek().loc, "trailing input after expression");
        result.errors = std::move(errors_);
        if (result.errors.empty())
            result.expr = std::move(e);
        return result;
    }

    bool startsWithClass() {
        return lex_.peek().kind == Tok::Ident && lex_.peek().text == "class";
    }

private:
    ClassDeclPtr classDecl() {
        SourceLoc loc = lex_.peek().loc;
        expectKeyword("class");
        std::string name = expectIdent("class name");
        expectKeyword("extends");
        std::string superName = expectIdent("superclass name");
        if (!errors_.empty())
            return nullptr;
        if (superName == name)
            error(loc, "class `" + name + "` cannot extend itself");
        expect(Tok::LBrace, "`{`");

        ClassDecl decl;
        decl.name = name;
        decl.superName = superName;
        decl.loc = loc;
        bool sawCtor = false;
        std::set<std::string> fieldNames;
        std::set<std::string> methodNames;

        while (errors_.empty() && lex_.peek().kind == Tok::Ident) {
            Token first = lex_.peek();
            if (first.text == name && lex_.peek2().kind == Tok::LParen) {
                if (sawCtor)
                    error(first.loc, "duplicate constructor in class `" + name + "`");
                decl.ctor = ctorDecl(decl, fieldNames);
                sawCtor = true;
                continue;
            }
            // `Type name ;` is a field, `Type name (` is a method.
            std::string type = expectIdent("member type");
            std::string memberName = expectIdent("member name");
            if (!errors_.empty())
                break;
            if (lex_.peek().kind == Tok::Semi) {
                lex_.take();
                if (sawCtor)
                    error(first.loc, "field `" + memberName + "` must precede the constructor");
                if (!fieldNames.insert(memberName).second)
                    error(first.loc, "duplicate field name `" + memberName + "`");
                decl.fields.push_back({type, memberName});
            } else if (lex_.peek().kind == Tok::LParen) {
                if (!methodNames.insert(memberName).second)
                    error(first.loc, "duplicate method name `" + memberName + "`");
                decl.methods.push_back(methodDecl(type, memberName, first.loc));
            } else {
                error(lex_.peek().loc, "expected `;` or `(` after member name");
            }
        }
        expect(Tok::RBrace, "`}`");
        if (errors_.empty() && !sawCtor)
            error(loc, "class `" + name + "` has no constructor");
        if (!errors_.empty())
            return nullptr;
        return std::make_shared<ClassDecl>(std::move(decl));
    }

    CtorDecl ctorDecl(const ClassDecl& decl, const std::set<std::string>&) {
        CtorDecl ctor;
        ctor.loc = lex_.peek().loc;
        lex_.take(); // class name
        expect(Tok::LParen, "`(`");
        std::vector<Param> params = paramList();
        expect(Tok::RParen, "`)`");
        expect(Tok::LBrace, "`{`");
        expectKeyword("super");
        expect(Tok::LParen, "`(`");
        std::vector<std::string> superArgs;
        if (lex_.peek().kind != Tok::RParen) {
            superArgs.push_back(expectIdent("argument name"));
            while (lex_.peek().kind == Tok::Comma) {
                lex_.take();
                superArgs.push_back(expectIdent("argument name"));
            }
        }
        expect(Tok::RParen, "`)`");
        expect(Tok::Semi, "`;`");
        std::vector<std::string> assigned;
        while (errors_.empty() && lex_.peek().kind == Tok::Ident &&
               lex_.peek().text == "this") {
            lex_.take();
            expect(Tok::Dot, "`.`");
            std::string field = expectIdent("field name");
            expect(Tok::Assign, "`=`");
            std::string value = expectIdent("parameter name");
            expect(Tok::Semi, "`;`");
            if (errors_.empty() && field != value)
                error(ctor.loc, "constructor must assign `this." + field + " = " + field + "`");
            assigned.push_back(field);
        }
        expect(Tok::RBrace, "`}`");
        if (!errors_.empty())
            return ctor;

        // Shape: params = superParams ++ ownParams; super(...) forwards the
        // first segment by name; the assignments cover the second in order
        // and match the declared fields.
        size_t superCount = superArgs.size();
        if (params.size() < superCount ||
            params.size() - superCount != assigned.size()) {
            error(ctor.loc, "constructor of `" + decl.name +
                                "` does not cover super arguments plus own fields");
            return ctor;
        }
        for (size_t i = 0; i < superCount; ++i) {
            if (params[i].name != superArgs[i]) {
                error(ctor.loc, "super(...) must forward the leading constructor parameters "
                                "in order");
                return ctor;
            }
        }
        for (size_t i = 0; i < assigned.size(); ++i) {
            if (params[superCount + i].name != assigned[i]) {
                error(ctor.loc, "field assignments must consume the trailing constructor "
                                "parameters in order");
                return ctor;
            }
        }
        if (assigned.size() != decl.fields.size()) {
            error(ctor.loc, "constructor of `" + decl.name + "` must assign every declared "
                                                             "field exactly once");
            return ctor;
        }
        for (size_t i = 0; i < assigned.size(); ++i) {
            if (assigned[i] != decl.fields[i].name ||
                params[superCount + i].type != decl.fields[i].type) {
                error(ctor.loc, "constructor parameter `" + assigned[i] +
                                    "` must match the declared field name and type in order");
                return ctor;
            }
        }
        ctor.superParams.assign(params.begin(), params.begin() + superCount);
        ctor.ownParams.assign(params.begin() + superCount, params.end());
        return ctor;
    }

    MethodDecl methodDecl(std::string returnType, std::string name, SourceLoc loc) {
        MethodDecl m;
        m.returnType = std::move(returnType);
        m.name = std::move(name);
        m.loc = loc;
        expect(Tok::LParen, "`(`");
        m.params = paramList();
        expect(Tok::RParen, "`)`");
        std::set<std::string> names;
        for (const Param& p : m.params) {
            if (p.name == "this")
                error(loc, "`this` cannot be a parameter name");
            else if (!names.insert(p.name).second)
                error(loc, "duplicate parameter name `" + p.name + "`");
        }
        expect(Tok::LBrace, "`{`");
        expectKeyword("return");
        m.body = expr();
        expect(Tok::Semi, "`;`");
        expect(Tok::RBrace, "`}`");
        if (!m.body)
            m.body = makeThis(loc);
        return m;
    }

    std::vector<Param> paramList() {
        std::vector<Param> params;
        if (lex_.peek().kind != Tok::Ident)
            return params;
        while (true) {
            std::string type = expectIdent("parameter type");
            std::string name = expectIdent("parameter name");
            params.push_back({std::move(type), std::move(name)});
            if (lex_.peek().kind != Tok::Comma)
                break;
            lex_.take();
        }
        return params;
    }

    ExprPtr expr() {
        ExprPtr e = primary();
        while (e && errors_.empty() && lex_.peek().kind == Tok::Dot) {
            lex_.take();
            SourceLoc loc = lex_.peek().loc;
            std::string member = expectIdent("member name");
            if (lex_.peek().kind == Tok::LParen) {
                lex_.take();
                std::vector<ExprPtr> args = argList();
                expect(Tok::RParen, "`)`");
                e = makeInvoke(std::move(e), std::move(member), std::move(args), loc);
            } else {
                e = makeFieldAccess(std::move(e), std::move(member), loc);
            }
        }
        return e;
    }

    ExprPtr primary() {
        Token t = lex_.peek();
        switch (t.kind) {
        case Tok::Number:
            lex_.take();
            if (t.text != "0") {
                error(t.loc, "only the literal `0` is supported; use succ(...) to build "
                             "larger numbers");
                return nullptr;
            }
            return makeNew("Zero", {}, t.loc);
        case Tok::LParen: {
            // Cast: `(C) e`, `(C)! e`, `(C)? e`.
            lex_.take();
            std::string cls = expectIdent("class name in cast");
            expect(Tok::RParen, "`)`");
            ExprKind kind = ExprKind::UCast;
            if (lex_.peek().kind == Tok::Bang) {
                lex_.take();
                kind = ExprKind::DCast;
            } else if (lex_.peek().kind == Tok::Question) {
                lex_.take();
                kind = ExprKind::SCast;
            }
            ExprPtr operand = expr();
            if (!operand)
                return nullptr;
            return makeCast(kind, std::move(cls), std::move(operand), t.loc);
        }
        case Tok::Ident:
            if (t.text == "this") {
                lex_.take();
                return makeThis(t.loc);
            }
            if (t.text == "new") {
                lex_.take();
                std::string cls = expectIdent("class name");
                expect(Tok::LParen, "`(`");
                std::vector<ExprPtr> args = argList();
                expect(Tok::RParen, "`)`");
                return makeNew(std::move(cls), std::move(args), t.loc);
            }
            if (t.text == "succ") {
                lex_.take();
                expect(Tok::LParen, "`(`");
                ExprPtr inner = expr();
                expect(Tok::RParen, "`)`");
                if (!inner)
                    return nullptr;
                return makeNew("Succ", {std::move(inner)}, t.loc);
            }
            lex_.take();
            return makeVar(t.text, t.loc);
        default:
            error(t.loc, "expected an expression");
            return nullptr;
        }
    }

    std::vector<ExprPtr> argList() {
        std::vector<ExprPtr> args;
        if (lex_.peek().kind == Tok::RParen)
            return args;
        while (errors_.empty()) {
            ExprPtr arg = expr();
            if (!arg)
                break;
            args.push_back(std::move(arg));
            if (lex_.peek().kind != Tok::Comma)
                break;
            lex_.take();
        }
        return args;
    }

    void expect(Tok kind, const std::string& what) {
        if (!errors_.empty())
            return;
        if (lex_.peek().kind == kind) {
            lex_.take();
            return;
        }
        error(lex_.peek().loc, "expected " + what);
    }

    void expectKeyword(const std::string& word) {
        if (!errors_.empty())
            return;
        if (lex_.peek().kind == Tok::Ident && lex_.peek().text == word) {
            lex_.take();
            return;
        }
        error(lex_.peek().loc, "expected `" + word + "`");
    }

    std::string expectIdent(const std::string& what) {
        if (!errors_.empty())
            return "";
        if (lex_.peek().kind == Tok::Ident)
            return lex_.take().text;
        error(lex_.peek().loc, "expected " + what);
        return "";
    }

    void error(SourceLoc loc, std::string message) {
        if (errors_.empty())
            errors_.push_back({loc, "parse", std::move(message)});
    }

    Lexer lex_;
    std::vector<Diagnostic> errors_;
};

} // namespace

ParseResult parseProgram(const std::string& text) {
    return Parser(text).program();
}

ParseResult parseExpr(const std::string& text) {
    return Parser(text).expression();
}

ParseResult parse(const std::string& text) {
    Parser probe(text);
    if (probe.startsWithClass())
        return parseProgram(text);
    return parseExpr(text);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void renderExpr(const Expr& e, std::ostringstream& out) {
    switch (e.kind) {
    case ExprKind::Var:
        out << e.name;
        break;
    case ExprKind::This:
        out << "this";
        break;
    case ExprKind::FieldAccess:
        renderExpr(*e.receiver, out);
        out << '.' << e.name;
        break;
    case ExprKind::Invoke:
        renderExpr(*e.receiver, out);
        out << '.' << e.name << '(';
        for (size_t i = 0; i < e.args.size(); ++i) {
            if (i)
                out << ", ";
            renderExpr(*e.args[i], out);
        }
        out << ')';
        break;
    case ExprKind::New:
        out << "new " << e.name << '(';
        for (size_t i = 0; i < e.args.size(); ++i) {
            if (i)
                out << ", ";
            renderExpr(*e.args[i], out);
        }
        out << ')';
        break;
    case ExprKind::UCast:
    case ExprKind::DCast:
    case ExprKind::SCast:
        out << '(' << e.name << ')';
        if (e.kind == ExprKind::DCast)
            out << '!';
        else if (e.kind == ExprKind::SCast)
            out << '?';
        out << ' ';
        renderExpr(*e.receiver, out);
        break;
    }
}

void renderDecl(const ClassDecl& d, std::ostringstream& out) {
    out << "class " << d.name << " extends " << d.superName << " {\n";
    for (const Param& f : d.fields)
        out << "  " << f.type << ' ' << f.name << ";\n";
    out << "  " << d.name << '(';
    bool first = true;
    for (const Param& p : d.ctor.superParams) {
        if (!first)
            out << ", ";
        out << p.type << ' ' << p.name;
        first = false;
    }
    for (const Param& p : d.ctor.ownParams) {
        if (!first)
            out << ", ";
        out << p.type << ' ' << p.name;
        first = false;
    }
    out << ") { super(";
    for (size_t i = 0; i < d.ctor.superParams.size(); ++i) {
        if (i)
            out << ", ";
        out << d.ctor.superParams[i].name;
    }
    out << ");";
    for (const Param& p : d.ctor.ownParams)
        out << " this." << p.name << " = " << p.name << ';';
    out << " }\n";
    for (const MethodDecl& m : d.methods) {
        out << "  " << m.returnType << ' ' << m.name << '(';
        for (size_t i = 0; i < m.params.size(); ++i) {
            if (i)
                out << ", ";
            out << m.params[i].type << ' ' << m.params[i].name;
        }
        out << ") { return ";
        renderExpr(*m.body, out);
        out << "; }\n";
    }
    out << "}\n";
}

} // namespace

std::string render(const Expr& expr) {
    std::ostringstream out;
    renderExpr(expr, out);
    return out.str();
}

std::string render(const ClassDecl& decl) {
    std::ostringstream out;
    renderDecl(decl, out);
    return out.str();
}

std::string render(const ProgramPtr& node) {
    std::ostringstream out;
    for (const ClassDeclPtr& decl : leaves(node)) {
        renderDecl(*decl, out);
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Structural hash (SHA-256 over the canonical rendering)

namespace {

class Sha256 {
public:
    Sha256() { reset(); }

    void update(const void* data, size_t len) {
        const uint8_t* bytes = static_cast<const uint8_t*>(data);
        total_ += len;
        while (len > 0) {
            size_t space = 64 - bufLen_;
            size_t take = std::min(space, len);
            std::memcpy(buf_ + bufLen_, bytes, take);
            bufLen_ += take;
            bytes += take;
            len -= take;
            if (bufLen_ == 64) {
                compress(buf_);
                bufLen_ = 0;
            }
        }
    }

    std::string hexDigest() {
        uint64_t bitLen = total_ * 8;
        uint8_t pad = 0x80;
        update(&pad, 1);
        uint8_t zero = 0;
        while (bufLen_ != 56)
            update(&zero, 1);
        uint8_t lenBytes[8];
        for (int i = 0; i < 8; ++i)
            lenBytes[i] = static_cast<uint8_t>(bitLen >> (56 - 8 * i));
        update(lenBytes, 8);
        static const char* hex = "0123456789abcdef";
        std::string out;
        out.reserve(64);
        for (uint32_t word : state_) {
            for (int shift = 28; shift >= 0; shift -= 4)
                out.push_back(hex[(word >> shift) & 0xF]);
        }
        reset();
        return out;
    }

private:
    void reset() {
        state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                  0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
        bufLen_ = 0;
        total_ = 0;
    }

    static uint32_t rotr(uint32_t v, int n) { return (v >> n) | (v << (32 - n)); }

    void compress(const uint8_t* block) {
        static const uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (uint32_t(block[4 * i]) << 24) | (uint32_t(block[4 * i + 1]) << 16) |
                   (uint32_t(block[4 * i + 2]) << 8) | uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
        uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];
        for (int i = 0; i < 64; ++i) {
            uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            uint32_t ch = (e & f) ^ (~e & g);
            uint32_t t1 = h + s1 + ch + k[i] + w[i];
            uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = s0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }

    std::array<uint32_t, 8> state_;
    uint8_t buf_[64];
    size_t bufLen_ = 0;
    uint64_t total_ = 0;
};

std::string sha256Hex(const std::string& data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hexDigest();
}

void keyOf(const ProgramPtr& node, std::ostringstream& out) {
    if (!node)
        return;
    if (node->isLeaf()) {
        out << "L[" << render(*node->decl) << ']';
        return;
    }
    out << "G(";
    for (const ProgramPtr& child : node->children)
        keyOf(child, out);
    out << ')';
}

} // namespace

std::string nodeKey(const ProgramPtr& node) {
    std::ostringstream out;
    keyOf(node, out);
    return sha256Hex(out.str());
}

std::string nodeKey(const Expr& expr) {
    return sha256Hex("E[" + render(expr) + "]");
}

} // namespace cocofj
