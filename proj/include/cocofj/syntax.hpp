#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

// FJ abstract syntax, concrete text syntax, structural identity, and the
// balanced program tree used by the incremental checker.

namespace cocofj {

using ClassName = std::string; // ground class type; "Object" is reserved

struct SourceLoc {
    int line = 0; // 1-based; 0 = unknown/synthesized
    int column = 0;

    bool known() const { return line > 0; }
    bool operator==(const SourceLoc& other) const = default;
};

struct Diagnostic {
    SourceLoc loc;
    std::string rule;    // short machine-ish tag: "parse", "unbound-variable", ...
    std::string message; // human text

    std::string format(const std::string& file) const;

    bool operator==(const Diagnostic& other) const = default;
};

struct Verdict {
    bool accepted = true;
    std::vector<Diagnostic> errors;

    explicit operator bool() const { return accepted; }
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
    Var,         // name
    This,        //
    FieldAccess, // receiver.name
    Invoke,      // receiver.name(args)
    New,         // new name(args)
    UCast,       // (name) receiver
    DCast,       // (name)! receiver
    SCast,       // (name)? receiver
};

struct Expr {
    ExprKind kind;
    SourceLoc loc;
    std::string name;          // variable / member / class name depending on kind
    ExprPtr receiver;          // FieldAccess, Invoke, casts
    std::vector<ExprPtr> args; // Invoke, New
};

ExprPtr makeVar(std::string name, SourceLoc loc = {});
ExprPtr makeThis(SourceLoc loc = {});
ExprPtr makeFieldAccess(ExprPtr receiver, std::string field, SourceLoc loc = {});
ExprPtr makeInvoke(ExprPtr receiver, std::string method, std::vector<ExprPtr> args,
                   SourceLoc loc = {});
ExprPtr makeNew(ClassName cls, std::vector<ExprPtr> args, SourceLoc loc = {});
ExprPtr makeCast(ExprKind castKind, ClassName cls, ExprPtr operand, SourceLoc loc = {});

bool exprEquals(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Declarations

struct Param {
    ClassName type;
    std::string name;

    bool operator==(const Param& other) const = default;
};

struct MethodDecl {
    ClassName returnType;
    std::string name;
    std::vector<Param> params; // names pairwise distinct, none equals "this"
    ExprPtr body;
    SourceLoc loc;
};

struct CtorDecl {
    std::vector<Param> superParams; // passed through to super(...)
    std::vector<Param> ownParams;   // assigned to this class's fields, in order
    SourceLoc loc;
};

struct ClassDecl {
    ClassName name;
    ClassName superName;
    std::vector<Param> fields;
    CtorDecl ctor;
    std::vector<MethodDecl> methods;
    SourceLoc loc;
};

using ClassDeclPtr = std::shared_ptr<const ClassDecl>;

bool classDeclEquals(const ClassDecl& a, const ClassDecl& b);

// ---------------------------------------------------------------------------
// Program tree: Group(children) | Leaf(decl)

struct ProgramNode;
using ProgramPtr = std::shared_ptr<const ProgramNode>;

struct ProgramNode {
    std::vector<ProgramPtr> children; // Group
    ClassDeclPtr decl;                // Leaf

    bool isLeaf() const { return decl != nullptr; }
};

ProgramPtr makeLeaf(ClassDeclPtr decl);
ProgramPtr makeGroup(std::vector<ProgramPtr> children);

// All leaf declarations, left to right.
std::vector<ClassDeclPtr> leaves(const ProgramPtr& node);

// Depth of the tree (a bare leaf has depth 0, a group adds one level).
int treeDepth(const ProgramPtr& node);

// Rebuilds the class list as a group tree of minimal depth (⌈log_arity n⌉),
// preserving left-to-right order. Empty input yields a single empty group.
ProgramPtr balance(const std::vector<ClassDeclPtr>& decls, int arity = 2);

// ---------------------------------------------------------------------------
// Concrete syntax

struct ParseResult {
    ProgramPtr program; // set when the text is a class sequence
    ExprPtr expr;       // set when the text is a single expression
    std::vector<Diagnostic> errors;

    bool ok() const { return errors.empty(); }
};

// Parses a whole program (one or more class declarations). The result is a
// flat group of leaves in declaration order; use balance() for the tree form.
ParseResult parseProgram(const std::string& text);

// Parses a single expression. `0` and `succ(e)` are accepted as sugar for
// `new Zero()` / `new Succ(e)`.
ParseResult parseExpr(const std::string& text);

// Dispatches on the leading token: `class` → program, otherwise expression.
ParseResult parse(const std::string& text);

// Canonical rendering; parse(render(n)) is structurally equal to n (groups
// are layout, so equality is taken over the flattened declaration list).
std::string render(const Expr& expr);
std::string render(const ClassDecl& decl);
std::string render(const ProgramPtr& node);

// Stable structural hash (hex string): a pure function of the rendered
// structure, independent of whitespace in the original source and of any
// session-local type-variable state.
std::string nodeKey(const ProgramPtr& node);
std::string nodeKey(const Expr& expr);

} // namespace cocofj
