#include "cocofj/constraints.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace cocofj {

TypeRef typeVar(ClassVar v) {
    TypeRef t;
    t.var = v;
    return t;
}

TypeRef typeGround(ClassName name) {
    TypeRef t;
    t.ground = std::move(name);
    return t;
}

std::string renderType(const TypeRef& t) {
    return t.isVar() ? "U" + std::to_string(t.var) : t.ground;
}

// ---------------------------------------------------------------------------
// Conditions

Condition conditionOn(TypeRef receiver) {
    Condition cond;
    cond.receiver = std::move(receiver);
    return cond;
}

namespace {

Condition markUnsat(Condition cond) {
    cond.unsatisfiable = true;
    // Canonical unsatisfiable form: conjuncts are irrelevant once the whole
    // condition is false, and clearing them makes equality checks meaningful.
    cond.notGround.clear();
    cond.notVar.clear();
    cond.sameVar.clear();
    cond.sameGroundAlternatives.clear();
    cond.eqGroundRaw.clear();
    return cond;
}

} // namespace

Condition conditionAddEq(Condition cond, const TypeRef& t, bool normalized) {
    if (cond.unsatisfiable)
        return cond;
    if (t == cond.receiver)
        return cond; // reflexive equation, trivially true
    if (!normalized) {
        if (t.isGround()) {
            if (std::find(cond.eqGroundRaw.begin(), cond.eqGroundRaw.end(), t.ground) ==
                cond.eqGroundRaw.end())
                cond.eqGroundRaw.push_back(t.ground);
        } else {
            cond.sameVar.insert(t.var);
        }
        return cond;
    }
    if (t.isGround()) {
        if (cond.receiver.isGround()) // distinct ground names (equal case returned above)
            return markUnsat(std::move(cond));
        if (cond.notGround.count(t.ground))
            return markUnsat(std::move(cond));
        if (!cond.sameGroundAlternatives.empty()) {
            if (!cond.sameGroundAlternatives.count(t.ground))
                return markUnsat(std::move(cond));
            cond.sameGroundAlternatives = {t.ground};
        } else {
            cond.sameGroundAlternatives = {t.ground};
            // receiver = C already implies every recorded ≠ D with D ≠ C.
            cond.notGround.clear();
        }
        return cond;
    }
    if (cond.notVar.count(t.var))
        return markUnsat(std::move(cond));
    cond.sameVar.insert(t.var);
    return cond;
}

Condition conditionAddNeq(Condition cond, const TypeRef& t, bool normalized) {
    if (cond.unsatisfiable)
        return cond;
    if (t == cond.receiver) // receiver ≠ receiver is absurd in any mode
        return markUnsat(std::move(cond));
    if (!normalized) {
        if (t.isGround())
            cond.notGround.insert(t.ground);
        else
            cond.notVar.insert(t.var);
        return cond;
    }
    if (t.isGround()) {
        if (cond.receiver.isGround())
            return cond; // distinct ground names: the conjunct just holds
        if (!cond.sameGroundAlternatives.empty()) {
            cond.sameGroundAlternatives.erase(t.ground);
            if (cond.sameGroundAlternatives.empty())
                return markUnsat(std::move(cond));
        } else {
            cond.notGround.insert(t.ground);
        }
        return cond;
    }
    if (cond.sameVar.count(t.var))
        return markUnsat(std::move(cond));
    cond.notVar.insert(t.var);
    return cond;
}

bool conditionIrrefutable(const Condition& cond) {
    return !cond.unsatisfiable && cond.notGround.empty() && cond.notVar.empty() &&
           cond.sameVar.empty() && cond.sameGroundAlternatives.empty() &&
           cond.eqGroundRaw.empty();
}

bool conditionInvariantsHold(const Condition& cond) {
    if (cond.unsatisfiable)
        return cond.notGround.empty() && cond.notVar.empty() && cond.sameVar.empty() &&
               cond.sameGroundAlternatives.empty() && cond.eqGroundRaw.empty();
    // (i) the receiver never appears in its own conjunct sets
    if (cond.receiver.isGround()) {
        if (cond.notGround.count(cond.receiver.ground) ||
            cond.sameGroundAlternatives.count(cond.receiver.ground))
            return false;
    } else {
        if (cond.notVar.count(cond.receiver.var) || cond.sameVar.count(cond.receiver.var))
            return false;
    }
    // (ii) ground alternatives and ground exclusions never coexist
    if (!cond.sameGroundAlternatives.empty() && !cond.notGround.empty())
        return false;
    // (iii) a variable is never both required and forbidden
    for (ClassVar v : cond.sameVar)
        if (cond.notVar.count(v))
            return false;
    return true;
}

CondEval evalCondition(const Condition& cond, const Substitution& subst) {
    if (cond.unsatisfiable)
        return CondEval::Fails;
    TypeRef recv = subst.resolve(cond.receiver);
    bool undecided = false;

    auto equal3 = [](const TypeRef& a, const TypeRef& b) {
        if (a == b)
            return CondEval::Holds;
        if (a.isGround() && b.isGround())
            return CondEval::Fails;
        return CondEval::Undecided;
    };
    auto fold = [&undecided](CondEval conjunct, bool negate) {
        if (negate)
            conjunct = conjunct == CondEval::Holds    ? CondEval::Fails
                       : conjunct == CondEval::Fails ? CondEval::Holds
                                                      : CondEval::Undecided;
        if (conjunct == CondEval::Fails)
            return false;
        if (conjunct == CondEval::Undecided)
            undecided = true;
        return true;
    };

    for (const ClassName& c : cond.eqGroundRaw)
        if (!fold(equal3(recv, typeGround(c)), false))
            return CondEval::Fails;
    if (!cond.sameGroundAlternatives.empty()) {
        if (recv.isGround()) {
            if (!cond.sameGroundAlternatives.count(recv.ground))
                return CondEval::Fails;
        } else {
            undecided = true;
        }
    }
    for (const ClassName& c : cond.notGround)
        if (!fold(equal3(recv, typeGround(c)), true))
            return CondEval::Fails;
    for (ClassVar v : cond.sameVar)
        if (!fold(equal3(recv, subst.resolve(typeVar(v))), false))
            return CondEval::Fails;
    for (ClassVar v : cond.notVar)
        if (!fold(equal3(recv, subst.resolve(typeVar(v))), true))
            return CondEval::Fails;
    return undecided ? CondEval::Undecided : CondEval::Holds;
}

std::string renderCondition(const Condition& cond) {
    if (cond.unsatisfiable)
        return "unsat";
    std::vector<std::string> parts;
    std::string recv = renderType(cond.receiver);
    for (const ClassName& c : cond.eqGroundRaw)
        parts.push_back(recv + " = " + c);
    if (!cond.sameGroundAlternatives.empty()) {
        if (cond.sameGroundAlternatives.size() == 1) {
            parts.push_back(recv + " = " + *cond.sameGroundAlternatives.begin());
        } else {
            std::string alts;
            for (const ClassName& c : cond.sameGroundAlternatives) {
                if (!alts.empty())
                    alts += ", ";
                alts += c;
            }
            parts.push_back(recv + " in {" + alts + "}");
        }
    }
    for (const ClassName& c : cond.notGround)
        parts.push_back(recv + " != " + c);
    for (ClassVar v : cond.sameVar)
        parts.push_back(recv + " = U" + std::to_string(v));
    for (ClassVar v : cond.notVar)
        parts.push_back(recv + " != U" + std::to_string(v));
    if (parts.empty())
        return "true";
    std::string out;
    for (const std::string& p : parts) {
        if (!out.empty())
            out += " & ";
        out += p;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constraint builders / rendering

namespace {

Constraint baseC(ConstraintKind kind, TypeRef lhs, TypeRef rhs, SourceLoc loc,
                 std::string note) {
    Constraint c;
    c.kind = kind;
    c.lhs = std::move(lhs);
    c.rhs = std::move(rhs);
    c.loc = loc;
    c.note = std::move(note);
    return c;
}

} // namespace

Constraint eqC(TypeRef lhs, TypeRef rhs, SourceLoc loc, std::string note) {
    return baseC(ConstraintKind::Eq, std::move(lhs), std::move(rhs), loc, std::move(note));
}
Constraint neqC(TypeRef lhs, TypeRef rhs, SourceLoc loc, std::string note) {
    return baseC(ConstraintKind::Neq, std::move(lhs), std::move(rhs), loc, std::move(note));
}
Constraint subC(TypeRef lhs, TypeRef rhs, SourceLoc loc, std::string note) {
    return baseC(ConstraintKind::Sub, std::move(lhs), std::move(rhs), loc, std::move(note));
}
Constraint notSubC(TypeRef lhs, TypeRef rhs, SourceLoc loc, std::string note) {
    return baseC(ConstraintKind::NotSub, std::move(lhs), std::move(rhs), loc,
                 std::move(note));
}
Constraint condEqC(TypeRef lhs, TypeRef rhs, Condition guard, SourceLoc loc,
                   std::string note) {
    Constraint c =
        baseC(ConstraintKind::CondEq, std::move(lhs), std::move(rhs), loc, std::move(note));
    c.guard = std::move(guard);
    return c;
}
Constraint condFailC(Condition guard, SourceLoc loc, std::string note) {
    Constraint c = baseC(ConstraintKind::CondFail, TypeRef{}, TypeRef{}, loc,
                         std::move(note));
    c.guard = std::move(guard);
    return c;
}

std::string renderConstraint(const Constraint& c) {
    switch (c.kind) {
    case ConstraintKind::Eq:
        return renderType(c.lhs) + " = " + renderType(c.rhs);
    case ConstraintKind::Neq:
        return renderType(c.lhs) + " != " + renderType(c.rhs);
    case ConstraintKind::Sub:
        return renderType(c.lhs) + " <: " + renderType(c.rhs);
    case ConstraintKind::NotSub:
        return renderType(c.lhs) + " !<: " + renderType(c.rhs);
    case ConstraintKind::CondEq:
        return renderType(c.lhs) + " = " + renderType(c.rhs) + " if " +
               renderCondition(c.guard);
    case ConstraintKind::CondFail:
        return "fail if " + renderCondition(c.guard);
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Substitution

ClassVar Substitution::findRoot(ClassVar v) const {
    ClassVar root = v;
    for (;;) {
        auto it = parent_.find(root);
        if (it == parent_.end() || it->second == root)
            break;
        root = it->second;
    }
    while (v != root) { // path compression
        ClassVar next = parent_[v];
        parent_[v] = root;
        v = next;
    }
    return root;
}

TypeRef Substitution::resolve(const TypeRef& t) const {
    if (t.isGround())
        return t;
    ClassVar root = findRoot(t.var);
    auto it = anchor_.find(root);
    if (it != anchor_.end())
        return typeGround(it->second);
    return typeVar(root);
}

bool Substitution::unify(const TypeRef& a, const TypeRef& b, bool* changed) {
    TypeRef ra = resolve(a);
    TypeRef rb = resolve(b);
    if (changed)
        *changed = false;
    if (ra == rb)
        return true;
    if (ra.isGround() && rb.isGround())
        return false;
    if (changed)
        *changed = true;
    if (ra.isGround()) {
        anchor_.emplace(rb.var, ra.ground);
        parent_.try_emplace(rb.var, rb.var);
        version_[rb.var] = ++clock_;
        return true;
    }
    if (rb.isGround()) {
        anchor_.emplace(ra.var, rb.ground);
        parent_.try_emplace(ra.var, ra.var);
        version_[ra.var] = ++clock_;
        return true;
    }
    // Deterministic representative: the smaller variable id wins.
    ClassVar keep = std::min(ra.var, rb.var);
    ClassVar drop = std::max(ra.var, rb.var);
    parent_[drop] = keep;
    parent_.try_emplace(keep, keep);
    // Stamped on the surviving root so that findRoot from either old class
    // lands on a version newer than any stamp taken before the merge.
    version_[keep] = ++clock_;
    return true;
}

std::uint64_t Substitution::rootVersion(ClassVar v) const {
    auto it = version_.find(findRoot(v));
    return it == version_.end() ? 0 : it->second;
}

std::map<ClassVar, TypeRef> Substitution::bindings() const {
    std::set<ClassVar> vars;
    for (const auto& [v, p] : parent_) {
        vars.insert(v);
        vars.insert(p);
    }
    for (const auto& [v, name] : anchor_)
        vars.insert(v);
    std::map<ClassVar, TypeRef> out;
    for (ClassVar v : vars) {
        TypeRef r = resolve(typeVar(v));
        if (r.isVar() && r.var == v)
            continue; // roots map to themselves: omitted
        out.emplace(v, std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Substitution application

TypeRef applySubst(const Substitution& subst, const TypeRef& t) {
    return subst.resolve(t);
}

Condition applySubst(const Substitution& subst, const Condition& cond, bool normalized) {
    Condition out = conditionOn(subst.resolve(cond.receiver));
    if (cond.unsatisfiable)
        return markUnsat(std::move(out));
    // Re-add every conjunct with resolved operands; the add functions fold
    // away what σ has decided (normalized mode) or re-bucket raw conjuncts.
    if (!cond.sameGroundAlternatives.empty()) {
        if (out.receiver.isGround()) {
            if (!cond.sameGroundAlternatives.count(out.receiver.ground))
                return markUnsat(std::move(out));
        } else {
            out.sameGroundAlternatives = cond.sameGroundAlternatives;
        }
    }
    for (const ClassName& c : cond.eqGroundRaw)
        out = conditionAddEq(std::move(out), typeGround(c), normalized);
    for (const ClassName& c : cond.notGround)
        out = conditionAddNeq(std::move(out), typeGround(c), normalized);
    for (ClassVar v : cond.sameVar)
        out = conditionAddEq(std::move(out), subst.resolve(typeVar(v)), normalized);
    for (ClassVar v : cond.notVar)
        out = conditionAddNeq(std::move(out), subst.resolve(typeVar(v)), normalized);
    return out;
}

Constraint applySubst(const Substitution& subst, const Constraint& c, bool normalized) {
    Constraint out = c;
    out.lhs = subst.resolve(c.lhs);
    out.rhs = subst.resolve(c.rhs);
    if (c.kind == ConstraintKind::CondEq || c.kind == ConstraintKind::CondFail)
        out.guard = applySubst(subst, c.guard, normalized);
    return out;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// Handles one constraint against the state: may extend σ, record the first
// failure, or push the constraint onto `defer`.
void processConstraint(SolverState& state, Constraint c, std::vector<Constraint>& defer,
                       bool& changed) {
    c.lhs = state.subst.resolve(c.lhs);
    c.rhs = state.subst.resolve(c.rhs);
    switch (c.kind) {
    case ConstraintKind::Eq: {
        bool grew = false;
        if (!state.subst.unify(c.lhs, c.rhs, &grew))
            state.failure = std::move(c);
        changed |= grew;
        return;
    }
    case ConstraintKind::Neq:
        if (c.lhs == c.rhs) {
            state.failure = std::move(c);
            return;
        }
        if (c.lhs.isGround() && c.rhs.isGround())
            return; // distinct ground classes: satisfied
        defer.push_back(std::move(c));
        return;
    case ConstraintKind::Sub:
        if (c.lhs == c.rhs)
            return; // reflexivity needs no hierarchy
        defer.push_back(std::move(c));
        return;
    case ConstraintKind::NotSub:
        if (c.lhs == c.rhs) {
            state.failure = std::move(c);
            return;
        }
        defer.push_back(std::move(c));
        return;
    case ConstraintKind::CondEq:
        switch (evalCondition(c.guard, state.subst)) {
        case CondEval::Holds: {
            bool grew = false;
            if (!state.subst.unify(c.lhs, c.rhs, &grew))
                state.failure = std::move(c);
            changed |= grew;
            return;
        }
        case CondEval::Fails:
            return; // guard refuted: constraint dissolves
        case CondEval::Undecided:
            c.guard = applySubst(state.subst, c.guard, state.normalizedConditions);
            defer.push_back(std::move(c));
            return;
        }
        return;
    case ConstraintKind::CondFail:
        switch (evalCondition(c.guard, state.subst)) {
        case CondEval::Holds:
            state.failure = std::move(c);
            return;
        case CondEval::Fails:
            return;
        case CondEval::Undecided:
            c.guard = applySubst(state.subst, c.guard, state.normalizedConditions);
            defer.push_back(std::move(c));
            return;
        }
        return;
    }
}

// Latest substitution-clock event among the variables whose resolution can
// change what processConstraint decides for `c`. A deferred constraint whose
// stamp is newer than this value would defer again unchanged, so sweeps skip
// it.
std::uint64_t lastTouch(const Substitution& subst, const Constraint& c) {
    std::uint64_t m = 0;
    auto touch = [&](const TypeRef& t) {
        if (t.isVar())
            m = std::max(m, subst.rootVersion(t.var));
    };
    touch(c.lhs);
    touch(c.rhs);
    if (c.kind == ConstraintKind::CondEq || c.kind == ConstraintKind::CondFail) {
        touch(c.guard.receiver);
        for (ClassVar v : c.guard.sameVar)
            m = std::max(m, subst.rootVersion(v));
        for (ClassVar v : c.guard.notVar)
            m = std::max(m, subst.rootVersion(v));
    }
    return m;
}

} // namespace

SolverState solveStep(SolverState state, const std::vector<Constraint>& fresh,
                      bool wakeDeferred) {
    state.deferredStamp.resize(state.deferred.size(), 0);
    if (state.failure) {
        // A failed state stays failed; keep the remaining constraints around.
        state.deferred.insert(state.deferred.end(), fresh.begin(), fresh.end());
        state.deferredStamp.resize(state.deferred.size(), 0);
        return state;
    }
    std::vector<Constraint> work = fresh;
    while (!work.empty()) {
        std::vector<Constraint> defer;
        std::vector<std::uint64_t> deferStamp;
        bool changed = false;
        for (Constraint& c : work) {
            if (state.failure) {
                defer.push_back(std::move(c));
                deferStamp.push_back(0);
                continue;
            }
            const std::uint64_t seen = state.subst.changeClock() + 1;
            const std::size_t before = defer.size();
            processConstraint(state, std::move(c), defer, changed);
            if (defer.size() != before)
                deferStamp.push_back(seen);
        }
        if (state.failure || !changed) {
            state.deferred.insert(state.deferred.end(),
                                  std::make_move_iterator(defer.begin()),
                                  std::make_move_iterator(defer.end()));
            state.deferredStamp.insert(state.deferredStamp.end(), deferStamp.begin(),
                                       deferStamp.end());
            break;
        }
        if (!wakeDeferred) {
            // Batch-local fixpoint: the fresh constraints chase each other,
            // but sleeping constraints are left for a later full solve.
            work = std::move(defer);
            continue;
        }
        // σ advanced: wake the deferred constraints a changed class reaches;
        // the others would defer again unchanged and stay asleep.
        std::vector<Constraint> next = std::move(defer);
        std::size_t keep = 0;
        for (std::size_t i = 0; i < state.deferred.size(); ++i) {
            Constraint& c = state.deferred[i];
            const std::uint64_t stamp = state.deferredStamp[i];
            if (stamp == 0 || lastTouch(state.subst, c) >= stamp) {
                next.push_back(std::move(c));
            } else {
                if (keep != i) {
                    state.deferred[keep] = std::move(c);
                    state.deferredStamp[keep] = stamp;
                }
                ++keep;
            }
        }
        state.deferred.resize(keep);
        state.deferredStamp.resize(keep);
        work = std::move(next);
    }
    return state;
}

FinalizeResult finalize(SolverState state, const SubclassRelation& sigma) {
    FinalizeResult out;
    if (state.failure) {
        out.violated = state.failure;
        return out;
    }
    std::vector<Constraint> pending = std::move(state.deferred);
    // Same sweep-skipping as solveStep: after the first pass, a pending
    // constraint none of whose variables changed since its last examination
    // would be kept unchanged. Stamps from solveStep do not carry over —
    // finalize also weighs Σ, which solveStep never saw, so every constraint
    // must be examined at least once (stamp 0).
    std::vector<std::uint64_t> stamp(pending.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Constraint> keep;
        std::vector<std::uint64_t> keepStamp;
        for (std::size_t idx = 0; idx < pending.size(); ++idx) {
            Constraint& c = pending[idx];
            if (stamp[idx] != 0 && lastTouch(state.subst, c) < stamp[idx]) {
                keep.push_back(std::move(c));
                keepStamp.push_back(stamp[idx]);
                continue;
            }
            const std::uint64_t seen = state.subst.changeClock() + 1;
            c.lhs = state.subst.resolve(c.lhs);
            c.rhs = state.subst.resolve(c.rhs);
            switch (c.kind) {
            case ConstraintKind::Eq: { // only via re-queued promotions
                bool grew = false;
                if (!state.subst.unify(c.lhs, c.rhs, &grew)) {
                    out.violated = std::move(c);
                    return out;
                }
                changed |= grew;
                continue;
            }
            case ConstraintKind::Sub:
                if (c.lhs == c.rhs)
                    continue;
                if (c.lhs.isGround() && c.rhs.isGround()) {
                    if (isSubtype(sigma, c.lhs.ground, c.rhs.ground))
                        continue;
                    out.violated = std::move(c);
                    return out;
                }
                keep.push_back(std::move(c));
                keepStamp.push_back(seen);
                continue;
            case ConstraintKind::NotSub:
                if (c.lhs == c.rhs) {
                    out.violated = std::move(c);
                    return out;
                }
                if (c.lhs.isGround() && c.rhs.isGround()) {
                    if (!isSubtype(sigma, c.lhs.ground, c.rhs.ground))
                        continue;
                    out.violated = std::move(c);
                    return out;
                }
                keep.push_back(std::move(c));
                keepStamp.push_back(seen);
                continue;
            case ConstraintKind::Neq:
                if (c.lhs == c.rhs) {
                    out.violated = std::move(c);
                    return out;
                }
                if (c.lhs.isGround() && c.rhs.isGround())
                    continue;
                keep.push_back(std::move(c));
                keepStamp.push_back(seen);
                continue;
            case ConstraintKind::CondEq:
                switch (evalCondition(c.guard, state.subst)) {
                case CondEval::Holds: {
                    bool grew = false;
                    if (!state.subst.unify(c.lhs, c.rhs, &grew)) {
                        out.violated = std::move(c);
                        return out;
                    }
                    changed |= grew;
                    continue;
                }
                case CondEval::Fails:
                    continue;
                case CondEval::Undecided:
                    keep.push_back(std::move(c));
                    keepStamp.push_back(seen);
                    continue;
                }
                continue;
            case ConstraintKind::CondFail:
                switch (evalCondition(c.guard, state.subst)) {
                case CondEval::Holds:
                    out.violated = std::move(c);
                    return out;
                case CondEval::Fails:
                    continue;
                case CondEval::Undecided:
                    keep.push_back(std::move(c));
                    keepStamp.push_back(seen);
                    continue;
                }
                continue;
            }
        }
        pending = std::move(keep);
        stamp = std::move(keepStamp);
    }
    // Solving is existential: conditional constraints whose guards never
    // ground can be satisfied by refuting the guard, so they are dropped.
    // Order tests and disequations still mentioning variables cannot be
    // adjudicated and reject the program.
    for (Constraint& c : pending) {
        if (c.kind == ConstraintKind::Sub || c.kind == ConstraintKind::NotSub ||
            c.kind == ConstraintKind::Neq) {
            out.violated = std::move(c);
            return out;
        }
    }
    out.ok = true;
    out.subst = std::move(state.subst);
    return out;
}

std::string dumpSolverState(const SolverState& state) {
    std::ostringstream out;
    for (const auto& [v, target] : state.subst.bindings()) {
        out << "U" << v << (target.isGround() ? " := " : " ~ ") << renderType(target)
            << '\n';
    }
    std::vector<std::string> lines;
    for (const Constraint& c : state.deferred)
        lines.push_back("defer " + renderConstraint(c));
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines)
        out << line << '\n';
    if (state.failure)
        out << "fail " << renderConstraint(*state.failure) << '\n';
    return out.str();
}

} // namespace cocofj
