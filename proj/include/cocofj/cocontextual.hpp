#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cocofj/class_table.hpp"
#include "cocofj/constraints.hpp"
#include "cocofj/requirements.hpp"
#include "cocofj/syntax.hpp"

// The constraint-based checker: expressions and declarations are checked
// bottom-up without a typing context or class table; what they would have
// looked up becomes a requirement, what they would have compared becomes a
// constraint. Demands are discharged against the declarations once, at the
// program root.

namespace cocofj {

struct CoOptions {
    ReqOptions reqs; // condition folding / alternative-set collapsing
};

// Starting class-variable id for a fresh session; reads COCOFJ_FRESH_SEED
// so replays can shift the variable namespace (default 1).
std::uint64_t freshSeedFromEnv();

// ---------------------------------------------------------------------------
// Expressions

struct CoExprResult {
    TypeRef type;
    SolverState solver;
    ContextReqs context;   // demands on variables and `this`
    ClassReqs classReqs;   // demands on declarations
    std::size_t peakLive = 0;
};

CoExprResult coCheckExpr(const ExprPtr& expr, FreshSource& fresh,
                         const CoOptions& opts = {});

// ---------------------------------------------------------------------------
// Declarations

struct CoMethodResult {
    SolverState solver;
    ClassVar enclosing = 0; // stands for the class this method sits in
    ClassReqs classReqs;
    std::vector<Diagnostic> errors; // free variables in the body
    std::size_t peakLive = 0;
};

CoMethodResult coCheckMethod(const MethodDecl& method, FreshSource& fresh,
                             const CoOptions& opts = {});

// Snapshot of one checked program subtree (a declaration or a group of
// them): the unit of memoization. Snapshots built from disjoint variable
// ranges merge without renaming.
struct CoClassResult {
    SolverState solver;
    ClassReqs classReqs;
    std::vector<Diagnostic> errors;
    std::size_t peakLive = 0;
    std::uint64_t freshFirst = 0; // variable ids drawn: [freshFirst, freshEnd)
    std::uint64_t freshEnd = 0;

    bool operator==(const CoClassResult& other) const = default;
};

CoClassResult coCheckClass(const ClassDecl& decl, FreshSource& fresh,
                           const CoOptions& opts = {});

// Replays the right snapshot's bindings and deferred constraints onto the
// left one. Intended for snapshots with disjoint variable ranges.
SolverState mergeSolverStates(SolverState left, const SolverState& right);

CoClassResult mergeClassResults(const std::vector<const CoClassResult*>& parts,
                                const CoOptions& opts = {});

// Checks a program subtree: classes at the leaves, merged at the groups.
CoClassResult coCheckNode(const ProgramPtr& node, FreshSource& fresh,
                          const CoOptions& opts = {});

// ---------------------------------------------------------------------------
// Whole programs

struct CoProgramResult {
    Verdict verdict;
    Substitution subst;  // final grounding (complete when accepted)
    ClassReqs residual;  // demands left after the root discharge
    std::size_t peakLive = 0;
};

// Classes ordered so every class precedes its superclass; removal in this
// order lets demands climb extends edges exactly like a member lookup.
std::vector<ClassName> dischargeOrder(const ClassTable& table);

struct DischargeResult {
    SolverState solver;
    ClassReqs residual;
    std::size_t peakLive = 0;
};

// Removes every declaration of the table from the requirement set — per class
// (in discharge order) methods, fields, constructor, then the extends edge,
// ending with the builtin Object constructor — solving as it goes.
DischargeResult dischargeAll(const ClassTable& table, SolverState state, ClassReqs reqs,
                             const CoOptions& opts = {});

// Root step: well-formedness gate, discharge of every declaration (methods,
// fields, constructor, then the extends edge per class; subclasses first;
// the builtin Object constructor last), finalize against the subclass
// relation, then the residual check.
CoProgramResult finishProgram(CoClassResult merged, const ProgramPtr& program,
                              const CoOptions& opts = {});

CoProgramResult coCheckProgram(const ProgramPtr& program, const CoOptions& opts = {});

} // namespace cocofj
