#include "cocofj/requirements.hpp"

#include <algorithm>
#include <cstddef>
#include <set>

namespace cocofj {

// ---------------------------------------------------------------------------
// Context requirements

ContextMergeResult mergeR(const std::vector<const ContextReqs*>& parts) {
    ContextMergeResult out;
    for (const ContextReqs* part : parts) {
        for (const auto& [name, type] : *part) {
            auto [it, inserted] = out.reqs.emplace(name, type);
            if (!inserted && it->second != type)
                out.constraints.push_back(
                    eqC(it->second, type, {}, "variable '" + name + "' used at one type"));
        }
    }
    return out;
}

ContextMergeResult removeVarReq(ContextReqs reqs, const std::string& name,
                                const TypeRef& declared, SourceLoc loc) {
    ContextMergeResult out;
    auto it = reqs.find(name);
    if (it != reqs.end()) {
        if (it->second != declared)
            out.constraints.push_back(
                eqC(it->second, declared, loc, "variable '" + name + "' declared here"));
        reqs.erase(it);
    }
    out.reqs = std::move(reqs);
    return out;
}

// ---------------------------------------------------------------------------
// Class requirement construction and rendering

const char* reqKindName(ReqKind kind) {
    switch (kind) {
    case ReqKind::Extends:
        return "Extends";
    case ReqKind::Ctor:
        return "Ctor";
    case ReqKind::Field:
        return "Field";
    case ReqKind::Method:
        return "Method";
    case ReqKind::OptMethod:
        return "OptMethod";
    }
    return "?";
}

ClassReq extendsReq(TypeRef receiver, TypeRef super) {
    return {ReqKind::Extends, std::move(receiver), "", {}, std::move(super)};
}

ClassReq ctorReq(TypeRef receiver, std::vector<TypeRef> params) {
    return {ReqKind::Ctor, std::move(receiver), "", std::move(params), std::nullopt};
}

ClassReq fieldReq(TypeRef receiver, std::string name, TypeRef type) {
    return {ReqKind::Field, std::move(receiver), std::move(name), {}, std::move(type)};
}

ClassReq methodReq(TypeRef receiver, std::string name, std::vector<TypeRef> params,
                   TypeRef ret) {
    return {ReqKind::Method, std::move(receiver), std::move(name), std::move(params),
            std::move(ret)};
}

ClassReq optMethodReq(TypeRef receiver, std::string name, std::vector<TypeRef> params,
                      TypeRef ret) {
    return {ReqKind::OptMethod, std::move(receiver), std::move(name), std::move(params),
            std::move(ret)};
}

std::string renderClassReq(const ClassReq& req) {
    std::string params;
    for (const TypeRef& p : req.params) {
        if (!params.empty())
            params += ", ";
        params += renderType(p);
    }
    std::string recv = renderType(req.receiver);
    switch (req.kind) {
    case ReqKind::Extends:
        return "Extends(" + recv + ", " + renderType(*req.result) + ")";
    case ReqKind::Ctor:
        return "Ctor(" + recv + ", (" + params + "))";
    case ReqKind::Field:
        return "Field(" + recv + ", " + req.member + ", " + renderType(*req.result) + ")";
    case ReqKind::Method:
    case ReqKind::OptMethod:
        return std::string(reqKindName(req.kind)) + "(" + recv + ", " + req.member +
               ", (" + params + ") -> " + renderType(*req.result) + ")";
    }
    return "?";
}

namespace {

std::string renderEntry(const ReqEntry& entry) {
    std::string line = renderClassReq(entry.req);
    if (!conditionIrrefutable(entry.cond))
        line += " if " + renderCondition(entry.cond);
    return line;
}

} // namespace

// ---------------------------------------------------------------------------
// ClassReqs container

ClassReqs::GroupKey ClassReqs::keyFor(const ClassReq& req) {
    return {static_cast<int>(req.kind), req.member};
}

void ClassReqs::insert(ReqEntry entry, const Substitution& subst, bool normalized) {
    if (normalized) {
        if (entry.cond.unsatisfiable ||
            evalCondition(entry.cond, subst) == CondEval::Fails)
            return;
    }
    std::vector<ReqEntry>& group = groups_[keyFor(entry.req)];
    for (const ReqEntry& existing : group)
        if (existing.req == entry.req && existing.cond == entry.cond)
            return; // set semantics: provenance metadata does not split entries
    group.push_back(std::move(entry));
}

bool ClassReqs::empty() const {
    for (const auto& [key, group] : groups_)
        if (!group.empty())
            return false;
    return true;
}

std::size_t ClassReqs::liveCount() const {
    std::size_t n = 0;
    for (const auto& [key, group] : groups_)
        n += group.size();
    return n;
}

std::vector<ReqEntry> ClassReqs::entries() const {
    std::vector<ReqEntry> out;
    for (const auto& [key, group] : groups_)
        out.insert(out.end(), group.begin(), group.end());
    return out;
}

std::string dumpClassReqs(const ClassReqs& reqs) {
    std::vector<std::string> lines;
    for (const ReqEntry& entry : reqs.entries())
        lines.push_back(renderEntry(entry));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const std::string& line : lines)
        out += line + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// mergeCR

namespace {

// Conditions that demand the same thing apart from which ground alternatives
// remain possible; such entries may collapse by unioning the alternatives.
bool condsEqualUpToAlternatives(const Condition& a, const Condition& b,
                                const Substitution& subst, bool normalized) {
    Condition ca = applySubst(subst, a, normalized);
    Condition cb = applySubst(subst, b, normalized);
    if (ca.unsatisfiable || cb.unsatisfiable)
        return false;
    if (conditionIrrefutable(ca) && conditionIrrefutable(cb))
        return true;
    return subst.resolve(ca.receiver) == subst.resolve(cb.receiver) &&
           ca.notGround == cb.notGround && ca.notVar == cb.notVar &&
           ca.sameVar == cb.sameVar && ca.eqGroundRaw == cb.eqGroundRaw;
}

void unionAlternatives(Condition& into, const Condition& from) {
    into.sameGroundAlternatives.insert(from.sameGroundAlternatives.begin(),
                                       from.sameGroundAlternatives.end());
}

// Equates the overlapping signature components of two requirements; a plain
// equation when the guard cannot fail, a conditional one otherwise.
void emitPair(std::vector<Constraint>& out, const TypeRef& a, const TypeRef& b,
              const Condition& guard, SourceLoc loc, const std::string& note) {
    if (a == b)
        return;
    if (conditionIrrefutable(guard))
        out.push_back(eqC(a, b, loc, note));
    else
        out.push_back(condEqC(a, b, guard, loc, note));
}

void emitSignaturePair(std::vector<Constraint>& out, const ClassReq& a,
                       const ClassReq& b, const Condition& guard, SourceLoc loc,
                       const std::string& note) {
    if (a.result && b.result)
        emitPair(out, *a.result, *b.result, guard, loc, note);
    for (std::size_t i = 0; i < a.params.size(); ++i)
        emitPair(out, a.params[i], b.params[i], guard, loc, note);
}

} // namespace

ClassMergeResult mergeCR(const ClassReqs& left, const ClassReqs& right,
                         const Substitution& subst, const ReqOptions& opts) {
    const bool norm = opts.normalizedConditions;
    ClassMergeResult out;

    std::set<ClassReqs::GroupKey> keys;
    for (const auto& [key, group] : left.groups())
        keys.insert(key);
    for (const auto& [key, group] : right.groups())
        keys.insert(key);

    for (const ClassReqs::GroupKey& key : keys) {
        auto lit = left.groups().find(key);
        auto rit = right.groups().find(key);
        std::vector<ReqEntry> ls =
            lit == left.groups().end() ? std::vector<ReqEntry>{} : lit->second;
        std::vector<ReqEntry> rs =
            rit == right.groups().end() ? std::vector<ReqEntry>{} : rit->second;
        std::vector<char> lAlive(ls.size(), 1), rAlive(rs.size(), 1);
        std::vector<ReqEntry> combined;

        const bool pairable = key.first != static_cast<int>(ReqKind::OptMethod);

        if (pairable) {
            for (std::size_t i = 0; i < ls.size(); ++i) {
                for (std::size_t j = 0; j < rs.size(); ++j) {
                    if (!lAlive[i] || !rAlive[j])
                        continue;
                    ReqEntry& a = ls[i];
                    ReqEntry& b = rs[j];
                    TypeRef ra = subst.resolve(a.req.receiver);
                    TypeRef rb = subst.resolve(b.req.receiver);
                    if (ra.isGround() && rb.isGround() && ra != rb)
                        continue; // demands on provably different classes
                    const std::string what =
                        key.second.empty() ? std::string(reqKindName(a.req.kind))
                                           : "'" + key.second + "'";
                    if (a.req.params.size() != b.req.params.size()) {
                        out.constraints.push_back(neqC(
                            a.req.receiver, b.req.receiver, a.loc,
                            "conflicting arities demanded of " + what));
                        continue;
                    }
                    const bool sameRecv = ra == rb;
                    Condition guard = sameRecv
                                          ? Condition{}
                                          : conditionAddEq(conditionOn(ra), rb, norm);
                    emitSignaturePair(out.constraints, a.req, b.req, guard, a.loc,
                                      "overlapping demands on " + what);
                    if (sameRecv) {
                        if (opts.inDepth &&
                            condsEqualUpToAlternatives(a.cond, b.cond, subst, norm)) {
                            unionAlternatives(a.cond, b.cond);
                            rAlive[j] = 0;
                        } else if (a.req == b.req && a.cond == b.cond) {
                            rAlive[j] = 0; // exact duplicate
                        }
                    } else if (conditionIrrefutable(a.cond) &&
                               conditionIrrefutable(b.cond)) {
                        // Unconditioned demands on receivers that may or may
                        // not coincide: split into the =/≠ alternatives.
                        ReqEntry merged = a;
                        merged.cond =
                            conditionAddEq(conditionOn(a.req.receiver), rb, norm);
                        combined.push_back(std::move(merged));
                        a.cond = conditionAddNeq(conditionOn(a.req.receiver), rb, norm);
                        b.cond = conditionAddNeq(conditionOn(b.req.receiver), ra, norm);
                    }
                    // Conditioned demands on possibly-distinct receivers pass
                    // through: their conditions range over different receivers,
                    // so no single combined entry could express the overlap.
                }
            }
        }

        for (std::size_t i = 0; i < ls.size(); ++i)
            if (lAlive[i])
                out.reqs.insert(std::move(ls[i]), subst, norm);
        for (std::size_t j = 0; j < rs.size(); ++j)
            if (rAlive[j])
                out.reqs.insert(std::move(rs[j]), subst, norm);
        for (ReqEntry& entry : combined)
            out.reqs.insert(std::move(entry), subst, norm);
    }
    return out;
}

ClassMergeResult mergeCR(const std::vector<const ClassReqs*>& parts,
                         const Substitution& subst, const ReqOptions& opts) {
    ClassMergeResult out;
    bool first = true;
    for (const ClassReqs* part : parts) {
        if (first) {
            // Run the single set through insert() for pruning/dedup parity.
            ClassMergeResult seed = mergeCR(*part, ClassReqs{}, subst, opts);
            out.reqs = std::move(seed.reqs);
            first = false;
            continue;
        }
        ClassMergeResult step = mergeCR(out.reqs, *part, subst, opts);
        out.reqs = std::move(step.reqs);
        out.constraints.insert(out.constraints.end(), step.constraints.begin(),
                               step.constraints.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Removal: discharging requirements against declarations

namespace {

// Groups matching a member lookup. Method declarations discharge both hard
// and optional method requirements of the same name.
std::vector<ClassReqs::GroupKey> groupsFor(ReqKind kind, const std::string& member) {
    if (kind == ReqKind::Method)
        return {{static_cast<int>(ReqKind::Method), member},
                {static_cast<int>(ReqKind::OptMethod), member}};
    return {{static_cast<int>(kind), member}};
}

struct DeclShape {
    std::vector<TypeRef> params;          // declared parameter types
    std::optional<TypeRef> result;        // declared field/return/super type
    std::string describe;                 // for constraint notes
};

// Conjuncts added to an entry's condition must range over the entry's own
// receiver; a condition that is still trivially true may have been built
// without one.
void anchorInPlace(ReqEntry& entry) {
    if (conditionIrrefutable(entry.cond) && entry.cond.receiver != entry.req.receiver)
        entry.cond = conditionOn(entry.req.receiver);
}

// conditionAddEq(base, cls, normalized) for a variable receiver, built
// without copying base's ground-exclusion set (the equation clears or
// intersects it away). nullopt when the conjunction is unsatisfiable.
std::optional<Condition> climbGuard(const Condition& base, const TypeRef& groundCls) {
    if (base.unsatisfiable)
        return std::nullopt;
    if (!base.sameGroundAlternatives.empty()) {
        if (!base.sameGroundAlternatives.count(groundCls.ground))
            return std::nullopt;
    } else if (base.notGround.count(groundCls.ground)) {
        return std::nullopt;
    }
    Condition out = conditionOn(base.receiver);
    out.sameVar = base.sameVar;
    out.notVar = base.notVar;
    out.eqGroundRaw = base.eqGroundRaw;
    out.sameGroundAlternatives = {groundCls.ground};
    return out;
}

// climbGuard with the unsatisfiable case spelled out in the canonical form
// conditionAddEq would produce (receiver kept, conjuncts cleared).
Condition guardEq(const Condition& base, const TypeRef& groundCls) {
    if (std::optional<Condition> g = climbGuard(base, groundCls))
        return std::move(*g);
    Condition out = conditionOn(base.receiver);
    out.unsatisfiable = true;
    return out;
}

// ClassReqs::insert semantics scoped to a single group vector: prune entries
// whose condition is already impossible (normalized mode) and collapse exact
// duplicates. Keeps removal from touching any group it does not discharge.
void insertIntoGroup(std::vector<ReqEntry>& group, ReqEntry entry,
                     const Substitution& subst, bool normalized) {
    if (normalized) {
        if (entry.cond.unsatisfiable ||
            evalCondition(entry.cond, subst) == CondEval::Fails)
            return;
    }
    for (const ReqEntry& existing : group)
        if (existing.req == entry.req && existing.cond == entry.cond)
            return;
    group.push_back(std::move(entry));
}

// Removal leaves groups it fully discharged behind as empty vectors; merges
// never create such keys, so drop them for a canonical shape.
void dropEmptyGroups(ClassReqs& reqs) {
    auto& groups = reqs.groups();
    for (auto it = groups.begin(); it != groups.end();) {
        if (it->second.empty())
            it = groups.erase(it);
        else
            ++it;
    }
}

// Shared removal walk: match every entry of the group against one declared
// member of class `cls`, emit the implied (possibly guarded) equations, and
// narrow or discharge the entry. Rewrites the group in place; other groups
// are never visited.
void dischargeGroup(const ClassName& cls, const ClassReqs::GroupKey& key,
                    const DeclShape& shape, ClassReqs& reqs,
                    std::vector<Constraint>& constraints, const Substitution& subst,
                    const ReqOptions& opts) {
    auto it = reqs.groups().find(key);
    if (it == reqs.groups().end() || it->second.empty())
        return;
    const bool norm = opts.normalizedConditions;
    const TypeRef groundCls = typeGround(cls);
    const bool opt = key.first == static_cast<int>(ReqKind::OptMethod);

    std::vector<ReqEntry> pending = std::move(it->second);
    it->second.clear();
    for (ReqEntry& entry : pending) {
        TypeRef recv = subst.resolve(entry.req.receiver);
        if (recv.isGround() && recv.ground != cls) {
            insertIntoGroup(it->second, std::move(entry), subst, norm);
            continue;
        }
        const bool matched = recv.isGround(); // resolves to cls itself
        Condition guard;
        if (matched) {
            guard = entry.cond;
        } else {
            anchorInPlace(entry);
            guard = norm ? guardEq(entry.cond, groundCls)
                         : conditionAddEq(entry.cond, groundCls, norm);
        }

        if (entry.req.params.size() != shape.params.size()) {
            constraints.push_back(condFailC(
                guard, entry.loc,
                shape.describe + " of class '" + cls + "' has a different arity"));
        } else {
            if (entry.req.result && shape.result)
                emitPair(constraints, *entry.req.result, *shape.result, guard,
                         entry.loc, shape.describe + " of class '" + cls + "'");
            for (std::size_t i = 0; i < shape.params.size(); ++i)
                emitPair(constraints, entry.req.params[i], shape.params[i], guard,
                         entry.loc, shape.describe + " of class '" + cls + "'");
        }

        if (matched)
            continue; // fully discharged against this declaration
        if (opt) {
            // Optional demands keep waiting for their receiver to resolve;
            // the guarded equations above already cover the `= cls` case.
            insertIntoGroup(it->second, std::move(entry), subst, norm);
        } else {
            entry.cond = conditionAddNeq(std::move(entry.cond), groundCls, norm);
            insertIntoGroup(it->second, std::move(entry), subst, norm);
        }
    }
}

std::vector<TypeRef> groundAll(const std::vector<ClassName>& names) {
    std::vector<TypeRef> out;
    out.reserve(names.size());
    for (const ClassName& n : names)
        out.push_back(typeGround(n));
    return out;
}

// Collapses same-signature entries that differ only in which ground
// alternatives their conditions still allow (the duplicates produced by
// climbing an extends edge).
void collapseAlternatives(ClassReqs& reqs, const Substitution& subst,
                          const ReqOptions& opts) {
    if (!opts.inDepth)
        return;
    for (auto& [key, group] : reqs.groups()) {
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size();) {
                const ReqEntry& a = group[i];
                const ReqEntry& b = group[j];
                bool sameSig = subst.resolve(a.req.receiver) ==
                                   subst.resolve(b.req.receiver) &&
                               a.req.params == b.req.params &&
                               a.req.result == b.req.result;
                if (sameSig &&
                    condsEqualUpToAlternatives(a.cond, b.cond, subst,
                                               opts.normalizedConditions)) {
                    unionAlternatives(group[i].cond, b.cond);
                    group.erase(group.begin() + static_cast<std::ptrdiff_t>(j));
                } else {
                    ++j;
                }
            }
        }
    }
}

} // namespace

RemoveResult removeMethods(const ClassName& cls, const std::vector<MethodDecl>& methods,
                           ClassReqs reqs, const Substitution& subst,
                           const ReqOptions& opts) {
    RemoveResult out;
    for (const MethodDecl& m : methods) {
        DeclShape shape;
        for (const Param& p : m.params)
            shape.params.push_back(typeGround(p.type));
        shape.result = typeGround(m.returnType);
        shape.describe = "method '" + m.name + "'";
        for (const ClassReqs::GroupKey& key : groupsFor(ReqKind::Method, m.name))
            dischargeGroup(cls, key, shape, reqs, out.constraints, subst, opts);
    }
    dropEmptyGroups(reqs);
    out.reqs = std::move(reqs);
    return out;
}

RemoveResult removeFields(const ClassName& cls, const std::vector<Param>& fields,
                          ClassReqs reqs, const Substitution& subst,
                          const ReqOptions& opts) {
    RemoveResult out;
    for (const Param& f : fields) {
        DeclShape shape;
        shape.result = typeGround(f.type);
        shape.describe = "field '" + f.name + "'";
        dischargeGroup(cls, {static_cast<int>(ReqKind::Field), f.name}, shape, reqs,
                       out.constraints, subst, opts);
    }
    dropEmptyGroups(reqs);
    out.reqs = std::move(reqs);
    return out;
}

RemoveResult removeCtor(const ClassName& cls, const std::vector<ClassName>& paramTypes,
                        ClassReqs reqs, const Substitution& subst,
                        const ReqOptions& opts) {
    RemoveResult out;
    DeclShape shape;
    shape.params = groundAll(paramTypes);
    shape.describe = "constructor";
    dischargeGroup(cls, {static_cast<int>(ReqKind::Ctor), ""}, shape, reqs,
                   out.constraints, subst, opts);
    dropEmptyGroups(reqs);
    out.reqs = std::move(reqs);
    return out;
}

bool AncestryIndex::declaredAbove(ReqKind kind, const ClassName& cls,
                                  const std::string& member) const {
    const auto& map = kind == ReqKind::Field ? fieldsAbove : methodsAbove;
    auto it = map.find(cls);
    return it != map.end() && it->second.count(member) != 0;
}

AncestryIndex buildAncestryIndex(const ClassTable& table) {
    AncestryIndex out;
    const std::size_t hopCap = table.classNames().size(); // acyclic by build gate
    for (const ClassName& cls : table.classNames()) {
        std::set<std::string> methods, fields;
        const ClassDecl* decl = table.declOf(cls);
        ClassName cur = decl ? decl->superName : ClassName{};
        for (std::size_t hops = 0; hops < hopCap; ++hops) {
            const ClassDecl* up = table.declOf(cur);
            if (!up)
                break;
            for (const MethodDecl& m : up->methods)
                methods.insert(m.name);
            for (const Param& f : up->fields)
                fields.insert(f.name);
            cur = up->superName;
        }
        if (!methods.empty())
            out.methodsAbove.emplace(cls, std::move(methods));
        if (!fields.empty())
            out.fieldsAbove.emplace(cls, std::move(fields));
    }
    return out;
}

RemoveResult removeExt(const ClassName& cls, const ClassName& superName, ClassReqs reqs,
                       const Substitution& subst, const ReqOptions& opts,
                       const AncestryIndex* above) {
    const bool norm = opts.normalizedConditions;
    const TypeRef groundCls = typeGround(cls);
    const TypeRef groundSuper = typeGround(superName);
    RemoveResult out;

    // The extends demand itself pins the superclass.
    DeclShape shape;
    shape.result = groundSuper;
    shape.describe = "superclass";
    dischargeGroup(cls, {static_cast<int>(ReqKind::Extends), ""}, shape, reqs,
                   out.constraints, subst, opts);

    // Member demands that may target `cls` climb the inheritance edge. This
    // is the one removal that must visit every entry, so it also re-prunes
    // entries whose conditions have since become impossible.
    for (auto& [key, group] : reqs.groups()) {
        const auto kind = static_cast<ReqKind>(key.first);
        if (kind == ReqKind::Extends || kind == ReqKind::Ctor)
            continue; // not inherited: extends was handled above, ctors never climb

        const bool memberAbove =
            above == nullptr || above->declaredAbove(kind, cls, key.second);

        // Rebuilding a group re-runs the dedup scan, so leave groups where
        // nothing discharges, climbs, or prunes exactly as they are.
        bool touched = false;
        for (const ReqEntry& entry : group) {
            TypeRef recv = subst.resolve(entry.req.receiver);
            if (recv.isGround() ? recv.ground == cls
                                : (memberAbove && kind != ReqKind::OptMethod)) {
                touched = true;
                break;
            }
            if (norm && evalCondition(entry.cond, subst) == CondEval::Fails) {
                touched = true;
                break;
            }
        }
        if (!touched)
            continue;

        std::vector<ReqEntry> pending = std::move(group);
        group.clear();
        for (ReqEntry& entry : pending) {
            TypeRef recv = subst.resolve(entry.req.receiver);
            if (kind == ReqKind::OptMethod) {
                // Override demands climb only once their receiver is known.
                if (recv.isGround() && recv.ground == cls)
                    entry.req.receiver = groundSuper;
                insertIntoGroup(group, std::move(entry), subst, norm);
                continue;
            }
            if (recv.isGround()) {
                if (recv.ground == cls)
                    entry.req.receiver = groundSuper;
                insertIntoGroup(group, std::move(entry), subst, norm);
                continue;
            }
            if (!memberAbove) {
                // No ancestor declares this member, so the climbed copy could
                // never discharge: whether the receiver later turns out to be
                // `cls` or not, the surviving entry gives the same verdict.
                insertIntoGroup(group, std::move(entry), subst, norm);
                continue;
            }
            anchorInPlace(entry);
            ReqEntry climbed;
            bool haveClimbed = false;
            if (norm) {
                // An unsatisfiable guard means no climbed entry at all: the
                // full conditionAddEq would build one only for insertion to
                // prune it again.
                if (std::optional<Condition> guard = climbGuard(entry.cond, groundCls)) {
                    climbed.req = entry.req;
                    climbed.req.receiver = groundSuper;
                    climbed.cond = std::move(*guard);
                    climbed.loc = entry.loc;
                    climbed.note = entry.note;
                    haveClimbed = true;
                }
            } else {
                climbed = entry;
                climbed.req.receiver = groundSuper;
                climbed.cond = conditionAddEq(entry.cond, groundCls, norm);
                haveClimbed = true;
            }
            entry.cond = conditionAddNeq(std::move(entry.cond), groundCls, norm);
            insertIntoGroup(group, std::move(entry), subst, norm);
            if (haveClimbed)
                insertIntoGroup(group, std::move(climbed), subst, norm);
        }
    }

    collapseAlternatives(reqs, subst, opts);
    dropEmptyGroups(reqs);
    out.reqs = std::move(reqs);
    return out;
}

// ---------------------------------------------------------------------------
// Ground satisfaction

namespace {

std::optional<ClassName> resolveGround(const Substitution& subst, const TypeRef& t) {
    TypeRef r = subst.resolve(t);
    if (r.isGround())
        return r.ground;
    return std::nullopt;
}

SatisfyResult violated(const ReqEntry& entry, const std::string& why) {
    return {false, renderEntry(entry) + ": " + why};
}

} // namespace

SatisfyResult satisfies(const ClassTable& table, const Substitution& subst,
                        const ClassReqs& reqs) {
    for (const ReqEntry& entry : reqs.entries()) {
        CondEval eval = evalCondition(entry.cond, subst);
        if (eval == CondEval::Fails)
            continue;
        if (eval == CondEval::Undecided)
            return violated(entry, "condition undecided under the substitution");

        auto recv = resolveGround(subst, entry.req.receiver);
        if (!recv)
            return violated(entry, "receiver does not resolve to a class");

        // Demanded signature, once every component resolves to a class name.
        auto demandedSig = [&]() -> std::optional<MethodSig> {
            MethodSig sig;
            for (const TypeRef& p : entry.req.params) {
                auto g = resolveGround(subst, p);
                if (!g)
                    return std::nullopt;
                sig.params.push_back(*g);
            }
            if (entry.req.result) {
                auto g = resolveGround(subst, *entry.req.result);
                if (!g)
                    return std::nullopt;
                sig.ret = *g;
            }
            return sig;
        }();

        switch (entry.req.kind) {
        case ReqKind::Extends: {
            if (!demandedSig)
                return violated(entry, "superclass does not resolve to a class");
            auto super = extendsLookup(*recv, table);
            if (!super || *super != demandedSig->ret)
                return violated(entry, "class '" + *recv + "' does not extend '" +
                                           demandedSig->ret + "'");
            break;
        }
        case ReqKind::Ctor: {
            if (!demandedSig)
                return violated(entry, "parameters do not resolve to classes");
            auto sig = fieldsLookup(*recv, table);
            if (!sig || sig->paramTypes != demandedSig->params)
                return violated(entry, "constructor of '" + *recv +
                                           "' takes different parameters");
            break;
        }
        case ReqKind::Field: {
            if (!demandedSig)
                return violated(entry, "field type does not resolve to a class");
            auto type = fieldLookup(entry.req.member, *recv, table);
            if (!type || *type != demandedSig->ret)
                return violated(entry, "class '" + *recv + "' has no field '" +
                                           entry.req.member + "' of that type");
            break;
        }
        case ReqKind::Method: {
            if (!demandedSig)
                return violated(entry, "signature does not resolve to classes");
            auto sig = mtypeLookup(entry.req.member, *recv, table);
            if (!sig || *sig != *demandedSig)
                return violated(entry, "class '" + *recv + "' has no method '" +
                                           entry.req.member + "' of that type");
            break;
        }
        case ReqKind::OptMethod: {
            auto sig = mtypeLookup(entry.req.member, *recv, table);
            if (!sig)
                break; // never declared anywhere: vacuously satisfied
            if (!demandedSig || *sig != *demandedSig)
                return violated(entry, "inherited method '" + entry.req.member +
                                           "' of '" + *recv +
                                           "' has a conflicting signature");
            break;
        }
        }
    }
    return {};
}

} // namespace cocofj
