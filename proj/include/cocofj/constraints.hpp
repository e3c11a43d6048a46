#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cocofj/class_table.hpp"
#include "cocofj/syntax.hpp"

// The constraint language of the constraint-based checker: class variables,
// conditional equations with normalized guard conditions, substitutions as a
// union-find with ground anchors, and the continuous solver.

namespace cocofj {

using ClassVar = std::uint64_t; // 0 is never a variable

// A type is either a ground class name or a class variable.
struct TypeRef {
    ClassVar var = 0;  // nonzero ⇒ variable
    ClassName ground;  // meaningful iff var == 0

    bool isVar() const { return var != 0; }
    bool isGround() const { return var == 0; }

    bool operator==(const TypeRef& other) const = default;
    auto operator<=>(const TypeRef& other) const = default;
};

TypeRef typeVar(ClassVar v);
TypeRef typeGround(ClassName name);
std::string renderType(const TypeRef& t);

// Monotonically increasing variable allocator. The start offset is
// configurable so sessions can be replayed under a shifted namespace.
class FreshSource {
public:
    explicit FreshSource(std::uint64_t firstId = 1) : next_(firstId == 0 ? 1 : firstId) {}

    ClassVar next() { return next_++; }
    std::uint64_t upcoming() const { return next_; }
    void advanceTo(std::uint64_t firstFree) { next_ = std::max(next_, firstFree); }

private:
    std::uint64_t next_;
};

// ---------------------------------------------------------------------------
// Conditions: conjunctions of (in)equations about one receiver type.
//
// Normalized form (the default): ground equations are folded into
// sameGroundAlternatives (a set of still-possible ground classes — a
// disjunction that only widens when duplicate requirements merge), ground
// inequations into notGround, variable (in)equations into sameVar/notVar,
// and contradictions set `unsatisfiable` eagerly.
//
// Raw form (normalization off): ground equations accumulate unfolded in
// eqGroundRaw and no cross-conjunct checks run; only a literal `T ≠ T`
// conjunct marks the condition unsatisfiable.

struct Condition {
    TypeRef receiver;
    std::set<ClassName> notGround;
    std::set<ClassVar> notVar;
    std::set<ClassVar> sameVar;
    std::set<ClassName> sameGroundAlternatives;
    bool unsatisfiable = false;
    std::vector<ClassName> eqGroundRaw; // raw mode only

    bool operator==(const Condition& other) const = default;
};

Condition conditionOn(TypeRef receiver);

// cond ∧ (receiver = t) / cond ∧ (receiver ≠ t).
Condition conditionAddEq(Condition cond, const TypeRef& t, bool normalized = true);
Condition conditionAddNeq(Condition cond, const TypeRef& t, bool normalized = true);

// No conjuncts and not unsatisfiable: holds under every substitution.
bool conditionIrrefutable(const Condition& cond);

// Structural invariants of the normalized form; property tests call this
// after every mutation.
bool conditionInvariantsHold(const Condition& cond);

enum class CondEval { Holds, Fails, Undecided };

std::string renderCondition(const Condition& cond);

// ---------------------------------------------------------------------------
// Constraints

enum class ConstraintKind {
    Eq,      // T = T′
    Neq,     // T ≠ T′
    Sub,     // T <: T′
    NotSub,  // T ⊀ T′
    CondEq,  // T = T′ if guard
    CondFail // guard ⇒ contradiction (arity clash under a refutable guard)
};

struct Constraint {
    ConstraintKind kind = ConstraintKind::Eq;
    TypeRef lhs;
    TypeRef rhs;
    Condition guard; // CondEq / CondFail
    SourceLoc loc;   // provenance for diagnostics
    std::string note;
    std::string rule; // typing rule that emitted it, for error reports

    bool operator==(const Constraint& other) const = default;
};

Constraint eqC(TypeRef lhs, TypeRef rhs, SourceLoc loc = {}, std::string note = "");
Constraint neqC(TypeRef lhs, TypeRef rhs, SourceLoc loc = {}, std::string note = "");
Constraint subC(TypeRef lhs, TypeRef rhs, SourceLoc loc = {}, std::string note = "");
Constraint notSubC(TypeRef lhs, TypeRef rhs, SourceLoc loc = {}, std::string note = "");
Constraint condEqC(TypeRef lhs, TypeRef rhs, Condition guard, SourceLoc loc = {},
                   std::string note = "");
Constraint condFailC(Condition guard, SourceLoc loc = {}, std::string note = "");

std::string renderConstraint(const Constraint& c);

// ---------------------------------------------------------------------------
// Substitution: union-find over class variables with ground anchors.

class Substitution {
public:
    // Representative of t: a ground type or the root variable of its class.
    TypeRef resolve(const TypeRef& t) const;

    // Identifies a and b. Returns false (and changes nothing) when both sides
    // resolve to distinct ground classes. `changed` reports whether the
    // substitution actually grew.
    bool unify(const TypeRef& a, const TypeRef& b, bool* changed = nullptr);

    bool isGround(const TypeRef& t) const { return resolve(t).isGround(); }

    // Flat view: every recorded variable to its representative.
    std::map<ClassVar, TypeRef> bindings() const;

    bool operator==(const Substitution& other) const {
        return bindings() == other.bindings();
    }

    // Change tracking for scheduling. The clock advances whenever σ grows;
    // rootVersion(v) is the clock value of the last event that changed what
    // v's class resolves to (0 if never). Purely an optimization channel:
    // equality and bindings() never look at it.
    std::uint64_t changeClock() const { return clock_; }
    std::uint64_t rootVersion(ClassVar v) const;

private:
    ClassVar findRoot(ClassVar v) const;

    mutable std::unordered_map<ClassVar, ClassVar> parent_;
    std::unordered_map<ClassVar, ClassName> anchor_; // root ⇒ ground class
    std::unordered_map<ClassVar, std::uint64_t> version_; // root ⇒ last change
    std::uint64_t clock_ = 0;
};

// Three-valued truth of cond under σ.
CondEval evalCondition(const Condition& cond, const Substitution& subst);

// ---------------------------------------------------------------------------
// Substitution application

TypeRef applySubst(const Substitution& subst, const TypeRef& t);

// Substituted and (when `normalized`) re-normalized: conjuncts decided by σ
// are folded away or collapse the condition to unsatisfiable.
Condition applySubst(const Substitution& subst, const Condition& cond,
                     bool normalized = true);

Constraint applySubst(const Substitution& subst, const Constraint& c,
                      bool normalized = true);

// ---------------------------------------------------------------------------
// Solver

struct SolverState {
    Substitution subst;
    std::vector<Constraint> deferred; // await more grounding or the final Σ
    std::optional<Constraint> failure;
    bool normalizedConditions = true;
    // Scheduling cache, parallel to `deferred`: 1 + the substitution clock at
    // each constraint's last examination (0 ⇒ examine on the next sweep).
    // Derived bookkeeping only — excluded from equality and serialization,
    // and safe to drop: missing stamps merely cause one re-examination.
    std::vector<std::uint64_t> deferredStamp;

    bool failed() const { return failure.has_value(); }

    bool operator==(const SolverState& other) const {
        return subst == other.subst && deferred == other.deferred &&
               failure == other.failure &&
               normalizedConditions == other.normalizedConditions;
    }
};

// Feeds constraints into the state: equations unify immediately, conditional
// equations promote/drop/defer on their guard, order tests wait for Σ unless
// syntactically decidable. Whenever σ grows, re-examines the deferred
// constraints a changed variable can affect (the rest provably re-defer).
// With `wakeDeferred` false only the fresh batch is driven to its fixpoint
// and previously deferred constraints stay asleep; callers that batch many
// steps use this and rely on a later full solve or finalize() to wake them.
SolverState solveStep(SolverState state, const std::vector<Constraint>& fresh,
                      bool wakeDeferred = true);

struct FinalizeResult {
    bool ok = false;
    Substitution subst;                // when ok
    std::optional<Constraint> violated; // when rejected

    explicit operator bool() const { return ok; }
};

// Decides every deferred constraint against the complete subclass relation:
// subtype tests via the reflexive-transitive closure, disequations by ground
// comparison, guards by three-valued evaluation to a fixpoint. Conditional
// constraints whose guards stay undecided are dropped (solving is
// existential); order tests or disequations left unground are rejected.
FinalizeResult finalize(SolverState state, const SubclassRelation& sigma);

// Sorted, deterministic dump of σ and the deferred constraints.
std::string dumpSolverState(const SolverState& state);

} // namespace cocofj
