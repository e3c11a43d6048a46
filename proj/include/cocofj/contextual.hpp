#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cocofj/class_table.hpp"
#include "cocofj/syntax.hpp"

// Reference checker: contextual typing with a class table and a variable
// context. Serves as the ground-truth oracle for the constraint-based
// checker in differential tests.

namespace cocofj {

// Variable bindings; `this` is an ordinary entry.
using TypingContext = std::map<std::string, ClassName>;

// C <: D within the table's extends chain (reflexive-transitive).
bool subtypeInTable(const ClassTable& table, const ClassName& c, const ClassName& d);

// Type of e under gamma, or nullopt with exactly one new diagnostic appended
// (the first failing premise; nested failures propagate without duplicates).
std::optional<ClassName> checkExpr(const TypingContext& gamma, const ClassTable& table,
                                   const Expr& e, std::vector<Diagnostic>& errors);

// Method-definition check: body type under parameters plus `this`, return
// subtyping, and override compatibility against the superclass. Appends every
// failing premise's diagnostic; true iff none failed.
bool checkMethod(const ClassName& cls, const ClassTable& table, const MethodDecl& method,
                 std::vector<Diagnostic>& errors);

// Class check: constructor parameters must be the superclass's field types
// followed by the own field types; then every method is checked.
bool checkClass(const ClassTable& table, const ClassDecl& decl,
                std::vector<Diagnostic>& errors);

// Whole-program check: table well-formedness, then every declaration.
// Checking continues across declarations so the verdict lists all errors.
Verdict checkProgram(const ProgramPtr& program);

} // namespace cocofj
