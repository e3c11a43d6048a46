#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cocofj/class_table.hpp"
#include "cocofj/constraints.hpp"
#include "cocofj/syntax.hpp"

namespace cocofj {

// ---------------------------------------------------------------------------
// Context requirements: what the surrounding scope must provide for variables.
// ---------------------------------------------------------------------------

// Maps a variable name (including "this") to the type the expression needs it
// to have. Duplicate demands are reconciled with equality constraints.
using ContextReqs = std::map<std::string, TypeRef>;

struct ContextMergeResult {
    ContextReqs reqs;
    std::vector<Constraint> constraints;
};

// Union of several requirement maps; a name demanded by more than one part
// keeps a single representative and the others are equated to it.
ContextMergeResult mergeR(const std::vector<const ContextReqs*>& parts);

// Discharges the requirement on `name` against a declared class: the entry is
// dropped and its type is pinned to `declared`. Absent names are a no-op.
ContextMergeResult removeVarReq(ContextReqs reqs, const std::string& name,
                                const TypeRef& declared, SourceLoc loc = {});

// ---------------------------------------------------------------------------
// Class requirements: what the rest of the program must declare.
// ---------------------------------------------------------------------------

enum class ReqKind {
    Extends,    // receiver must extend `result`
    Ctor,       // receiver's constructor must take `params`
    Field,      // receiver must have field `member` of type `result`
    Method,     // receiver must have method `member` of type `params -> result`
    OptMethod,  // like Method, but vacuously satisfied when never declared
};

const char* reqKindName(ReqKind kind);

struct ClassReq {
    ReqKind kind = ReqKind::Field;
    TypeRef receiver;
    std::string member;           // empty for Extends / Ctor
    std::vector<TypeRef> params;  // Ctor and (Opt)Method parameter types
    std::optional<TypeRef> result;

    bool operator==(const ClassReq&) const = default;
};

ClassReq extendsReq(TypeRef receiver, TypeRef super);
ClassReq ctorReq(TypeRef receiver, std::vector<TypeRef> params);
ClassReq fieldReq(TypeRef receiver, std::string name, TypeRef type);
ClassReq methodReq(TypeRef receiver, std::string name, std::vector<TypeRef> params,
                   TypeRef ret);
ClassReq optMethodReq(TypeRef receiver, std::string name, std::vector<TypeRef> params,
                      TypeRef ret);

std::string renderClassReq(const ClassReq& req);

// One requirement together with the condition under which it is demanded and
// the source position that gave rise to it (for residual diagnostics).
struct ReqEntry {
    ClassReq req;
    Condition cond;
    SourceLoc loc;
    std::string note;

    bool operator==(const ReqEntry&) const = default;
};

struct ReqOptions {
    bool normalizedConditions = true;  // fold condition conjuncts eagerly
    bool inDepth = true;               // collapse alternative-set duplicates
};

// A set of conditioned class requirements, grouped by member so merges and
// removals only ever examine same-shaped entries.
class ClassReqs {
  public:
    using GroupKey = std::pair<int, std::string>;  // (kind, member name)

    static GroupKey keyFor(const ClassReq& req);

    // Inserts with set semantics (exact duplicates collapse); entries whose
    // condition is already impossible are pruned when `normalized` is set.
    void insert(ReqEntry entry, const Substitution& subst, bool normalized);

    bool empty() const;
    std::size_t liveCount() const;

    const std::map<GroupKey, std::vector<ReqEntry>>& groups() const { return groups_; }
    std::map<GroupKey, std::vector<ReqEntry>>& groups() { return groups_; }

    // All entries in deterministic (group, insertion) order.
    std::vector<ReqEntry> entries() const;

    bool operator==(const ClassReqs&) const = default;

  private:
    std::map<GroupKey, std::vector<ReqEntry>> groups_;
};

std::string dumpClassReqs(const ClassReqs& reqs);

struct ClassMergeResult {
    ClassReqs reqs;
    std::vector<Constraint> constraints;
};

// Merges requirement sets pairwise: overlapping demands are equated (guarded
// by receiver equality when the receivers may still differ), unconditioned
// entries on distinct receivers are split into the =/≠ alternatives, and with
// `inDepth` enabled entries that differ only in their ground-alternative sets
// collapse into one.
ClassMergeResult mergeCR(const ClassReqs& left, const ClassReqs& right,
                         const Substitution& subst, const ReqOptions& opts);
ClassMergeResult mergeCR(const std::vector<const ClassReqs*>& parts,
                         const Substitution& subst, const ReqOptions& opts);

struct RemoveResult {
    ClassReqs reqs;
    std::vector<Constraint> constraints;
};

// Discharges requirements against the declarations of class `cls`. Matching
// entries emit the equations their demand implies (guarded by the entry's
// condition and, for unresolved receivers, by `receiver = cls`) and are
// narrowed so they can no longer match `cls`.
RemoveResult removeMethods(const ClassName& cls, const std::vector<MethodDecl>& methods,
                           ClassReqs reqs, const Substitution& subst,
                           const ReqOptions& opts);
RemoveResult removeFields(const ClassName& cls, const std::vector<Param>& fields,
                          ClassReqs reqs, const Substitution& subst,
                          const ReqOptions& opts);
RemoveResult removeCtor(const ClassName& cls, const std::vector<ClassName>& paramTypes,
                        ClassReqs reqs, const Substitution& subst,
                        const ReqOptions& opts);

// Which member names are declared in each class's strict ancestors. An
// extends removal armed with this index skips the stay/climb split for
// member demands that no ancestor can ever satisfy: the climbed copy would
// discharge against nothing, and without it the stayed entry reaches the
// residual set with the same verdict. Classes absent from a map have no
// relevant ancestors.
struct AncestryIndex {
    std::map<ClassName, std::set<std::string>> methodsAbove;
    std::map<ClassName, std::set<std::string>> fieldsAbove;

    bool declaredAbove(ReqKind kind, const ClassName& cls,
                       const std::string& member) const;
};

// Built from a complete table by unioning declarations up each extends chain.
AncestryIndex buildAncestryIndex(const ClassTable& table);

// Discharges `cls extends super`: extends-requirements on `cls` pin the super,
// and member requirements that may target `cls` climb to `super` (duplicated
// under the `receiver = cls` condition when the receiver is still unresolved).
// Without an index every unresolved-receiver entry splits (sound for any
// program); with one, splits that cannot matter are elided.
RemoveResult removeExt(const ClassName& cls, const ClassName& superName, ClassReqs reqs,
                       const Substitution& subst, const ReqOptions& opts,
                       const AncestryIndex* above = nullptr);

// ---------------------------------------------------------------------------
// Ground semantics: does a class table satisfy a requirement set?
// ---------------------------------------------------------------------------

struct SatisfyResult {
    bool ok = true;
    std::string reason;  // first violated requirement, rendered
};

// Checks every entry whose condition holds under `subst` against the table.
// Requirements whose condition fails are vacuous; receivers must resolve to
// ground names (callers provide a grounding substitution).
SatisfyResult satisfies(const ClassTable& table, const Substitution& subst,
                        const ClassReqs& reqs);

}  // namespace cocofj
