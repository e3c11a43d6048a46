#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cocofj/syntax.hpp"

// Decomposed class table: declarations indexed for O(1) member lookup, the
// four lookup functions, and the immediate-subclass relation Σ with its
// reflexive-transitive subtype test.

namespace cocofj {

struct MethodSig {
    std::vector<ClassName> params;
    ClassName ret;

    bool operator==(const MethodSig& other) const = default;
};

// fields(C) presented as a constructor signature C.init(D̄): the full
// inherited-then-own field type sequence, root-first.
struct CtorSig {
    ClassName cls;
    std::vector<ClassName> paramTypes;

    bool operator==(const CtorSig& other) const = default;
};

// Immediate extends pairs: C ↦ D for each `class C extends D`. Object has no
// entry. isSubtype() closes this reflexively and transitively.
struct SubclassRelation {
    std::map<ClassName, ClassName> parent;
};

class ClassTable {
public:
    bool declared(const ClassName& cls) const; // true for Object and every entry
    const ClassDecl* declOf(const ClassName& cls) const; // null for Object/unknown

    // Own (non-inherited) member clauses of one class.
    const MethodDecl* ownMethod(const ClassName& cls, const std::string& name) const;
    std::optional<ClassName> ownField(const ClassName& cls, const std::string& name) const;

    // Declared constructor parameter types (super segment then own fields).
    std::optional<std::vector<ClassName>> ctorParams(const ClassName& cls) const;

    // Class names in declaration order (excludes Object).
    const std::vector<ClassName>& classNames() const { return order_; }

    void add(ClassDeclPtr decl); // no validation; buildClassTable validates

private:
    struct Entry {
        ClassDeclPtr decl;
        std::unordered_map<std::string, ClassName> fieldType;
        std::unordered_map<std::string, const MethodDecl*> method;
    };

    std::vector<ClassName> order_;
    std::unordered_map<ClassName, Entry> byName_;
};

struct ClassTableResult {
    ClassTable table;
    std::vector<Diagnostic> errors;

    bool ok() const { return errors.empty(); }
};

// Collects every declaration reachable from the program tree and validates
// table well-formedness: unique class names, unique member clauses, an
// acyclic extends relation, and no field shadowing along any ancestor chain.
// Superclasses need not be declared (checkers report unknown supers).
ClassTableResult buildClassTable(const ProgramPtr& program);

// Type of field f as seen from C: nearest ancestor declaring f (shadowing is
// excluded at build time, so the declarer is unique). not-found → nullopt.
std::optional<ClassName> fieldLookup(const std::string& f, const ClassName& cls,
                                     const ClassTable& table);

// fields(C) as C.init(D̄). nullopt iff C or one of its ancestors is undeclared.
std::optional<CtorSig> fieldsLookup(const ClassName& cls, const ClassTable& table);

// Signature of m at the nearest ancestor of C declaring it. not-found is an
// ordinary result (method-definition checks probe the superclass with it).
std::optional<MethodSig> mtypeLookup(const std::string& m, const ClassName& cls,
                                     const ClassTable& table);

// Immediate superclass of C; nullopt for Object and undeclared classes.
std::optional<ClassName> extendsLookup(const ClassName& cls, const ClassTable& table);

SubclassRelation projectExtends(const ClassTable& table);
SubclassRelation projectExtends(const ProgramPtr& program);

// (C, D) ∈ Σ*: reflexive-transitive closure of the immediate relation.
bool isSubtype(const SubclassRelation& sigma, const ClassName& c, const ClassName& d);

// Deterministic clause listing, one clause per line, sorted.
std::string dumpClauses(const ClassTable& table);

} // namespace cocofj
