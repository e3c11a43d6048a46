#include "cocofj/cocontextual.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <utility>

namespace cocofj {

std::uint64_t freshSeedFromEnv() {
    const char* raw = std::getenv("COCOFJ_FRESH_SEED");
    if (!raw || !*raw)
        return 1;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || parsed == 0)
        return 1;
    return parsed;
}

namespace {

// Stamps the emitting typing rule onto constraints that don't carry one yet,
// so a later failure can be reported against the right rule.
std::vector<Constraint> tagged(std::vector<Constraint> cs, const char* rule) {
    for (Constraint& c : cs)
        if (c.rule.empty())
            c.rule = rule;
    return cs;
}

// A freshly demanded requirement: unconditioned, anchored on its receiver.
ReqEntry demand(ClassReq req, SourceLoc loc, std::string note) {
    Condition cond = conditionOn(req.receiver);
    return {std::move(req), std::move(cond), loc, std::move(note)};
}

ClassReq resolveReq(const Substitution& subst, ClassReq req) {
    req.receiver = subst.resolve(req.receiver);
    for (TypeRef& p : req.params)
        p = subst.resolve(p);
    if (req.result)
        req.result = subst.resolve(*req.result);
    return req;
}

// Renumbers the variables of one diagnostic by first appearance, so the
// printed message does not depend on which absolute ids a session drew.
// Cached and cold runs of the same program then report identical text.
struct VarCanon {
    std::map<ClassVar, ClassVar> seen;

    ClassVar id(ClassVar v) {
        auto [it, inserted] = seen.emplace(v, static_cast<ClassVar>(seen.size() + 1));
        (void)inserted;
        return it->second;
    }

    TypeRef type(TypeRef t) {
        if (t.isVar())
            t.var = id(t.var);
        return t;
    }

    Condition cond(Condition c) {
        c.receiver = type(c.receiver);
        std::set<ClassVar> notVar, sameVar;
        for (ClassVar v : c.notVar)
            notVar.insert(id(v));
        for (ClassVar v : c.sameVar)
            sameVar.insert(id(v));
        c.notVar = std::move(notVar);
        c.sameVar = std::move(sameVar);
        return c;
    }

    Constraint constraint(Constraint c) {
        c.lhs = type(c.lhs);
        c.rhs = type(c.rhs);
        c.guard = cond(std::move(c.guard));
        return c;
    }

    ClassReq req(ClassReq r) {
        r.receiver = type(r.receiver);
        for (TypeRef& p : r.params)
            p = type(p);
        if (r.result)
            r.result = type(*r.result);
        return r;
    }
};

// ---------------------------------------------------------------------------
// Expression walk

struct ExprParts {
    TypeRef type;
    ContextReqs context;
    ClassReqs classReqs;
};

// Checks one expression bottom-up, feeding every emitted constraint into a
// single threaded solver state so equations simplify as soon as they appear.
class ExprWalker {
public:
    ExprWalker(FreshSource& fresh, const CoOptions& opts) : fresh_(fresh), opts_(opts) {
        state_.normalizedConditions = opts.reqs.normalizedConditions;
    }

    ExprParts check(const Expr& e);

    SolverState takeState() { return std::move(state_); }
    std::size_t peak() const { return peak_; }

private:
    void absorb(std::vector<Constraint> cs, const char* rule) {
        state_ = solveStep(std::move(state_), tagged(std::move(cs), rule));
    }

    // Union of the sub-results plus this node's own demand: variable
    // requirements merge with equations, class requirements merge pairwise.
    ExprParts mergeParts(std::vector<ExprParts> parts, ClassReqs own, const char* rule);

    FreshSource& fresh_;
    const CoOptions& opts_;
    SolverState state_;
    std::size_t peak_ = 0;
};

ExprParts ExprWalker::mergeParts(std::vector<ExprParts> parts, ClassReqs own,
                                 const char* rule) {
    std::vector<const ContextReqs*> contexts;
    contexts.reserve(parts.size());
    for (const ExprParts& p : parts)
        contexts.push_back(&p.context);
    ContextMergeResult mergedR = mergeR(contexts);
    absorb(std::move(mergedR.constraints), rule);

    std::vector<const ClassReqs*> reqParts;
    reqParts.reserve(parts.size() + 1);
    for (const ExprParts& p : parts)
        reqParts.push_back(&p.classReqs);
    if (!own.empty())
        reqParts.push_back(&own);
    ClassMergeResult mergedCR = mergeCR(reqParts, state_.subst, opts_.reqs);
    absorb(std::move(mergedCR.constraints), rule);

    ExprParts out;
    out.context = std::move(mergedR.reqs);
    out.classReqs = std::move(mergedCR.reqs);
    peak_ = std::max(peak_, out.classReqs.liveCount());
    return out;
}

ExprParts ExprWalker::check(const Expr& e) {
    const bool norm = opts_.reqs.normalizedConditions;
    switch (e.kind) {
    case ExprKind::Var:
    case ExprKind::This: {
        // The variable gets a fresh type; the context must provide it.
        ExprParts out;
        out.type = typeVar(fresh_.next());
        out.context.emplace(e.kind == ExprKind::This ? "this" : e.name, out.type);
        return out;
    }
    case ExprKind::FieldAccess: {
        ExprParts recv = check(*e.receiver);
        TypeRef fieldType = typeVar(fresh_.next());
        ClassReqs own;
        own.insert(demand(fieldReq(recv.type, e.name, fieldType), e.loc,
                          "required by the access to field `" + e.name + "`"),
                   state_.subst, norm);
        std::vector<ExprParts> parts;
        parts.push_back(std::move(recv));
        ExprParts out = mergeParts(std::move(parts), std::move(own), "TC-Field");
        out.type = fieldType;
        return out;
    }
    case ExprKind::Invoke: {
        std::vector<ExprParts> parts;
        parts.push_back(check(*e.receiver));
        for (const ExprPtr& arg : e.args)
            parts.push_back(check(*arg));
        TypeRef ret = typeVar(fresh_.next());
        std::vector<TypeRef> paramVars;
        paramVars.reserve(e.args.size());
        for (std::size_t i = 0; i < e.args.size(); ++i)
            paramVars.push_back(typeVar(fresh_.next()));

        std::vector<Constraint> argFlows;
        for (std::size_t i = 0; i < e.args.size(); ++i)
            argFlows.push_back(subC(parts[i + 1].type, paramVars[i], e.args[i]->loc,
                                    "argument " + std::to_string(i + 1) +
                                        " of the call to `" + e.name + "`"));
        absorb(std::move(argFlows), "TC-Invk");

        TypeRef recvType = parts.front().type;
        ClassReqs own;
        own.insert(demand(methodReq(recvType, e.name, std::move(paramVars), ret), e.loc,
                          "required by the call to `" + e.name + "`"),
                   state_.subst, norm);
        ExprParts out = mergeParts(std::move(parts), std::move(own), "TC-Invk");
        out.type = ret;
        return out;
    }
    case ExprKind::New: {
        std::vector<ExprParts> parts;
        for (const ExprPtr& arg : e.args)
            parts.push_back(check(*arg));
        std::vector<TypeRef> paramVars;
        paramVars.reserve(e.args.size());
        for (std::size_t i = 0; i < e.args.size(); ++i)
            paramVars.push_back(typeVar(fresh_.next()));

        std::vector<Constraint> argFlows;
        for (std::size_t i = 0; i < e.args.size(); ++i)
            argFlows.push_back(subC(parts[i].type, paramVars[i], e.args[i]->loc,
                                    "argument " + std::to_string(i + 1) + " of `new " +
                                        e.name + "(...)`"));
        absorb(std::move(argFlows), "TC-New");

        ClassReqs own;
        own.insert(demand(ctorReq(typeGround(e.name), std::move(paramVars)), e.loc,
                          "required by `new " + e.name + "(...)`"),
                   state_.subst, norm);
        ExprParts out = mergeParts(std::move(parts), std::move(own), "TC-New");
        out.type = typeGround(e.name);
        return out;
    }
    case ExprKind::UCast: {
        ExprParts out = check(*e.receiver);
        absorb({subC(out.type, typeGround(e.name), e.loc,
                     "upcast target `" + e.name + "` must be a supertype of the operand")},
               "TC-UCast");
        out.type = typeGround(e.name);
        return out;
    }
    case ExprKind::DCast: {
        ExprParts out = check(*e.receiver);
        const std::string why =
            "downcast target `" + e.name + "` must be a proper subtype of the operand";
        absorb({subC(typeGround(e.name), out.type, e.loc, why),
                neqC(typeGround(e.name), out.type, e.loc, why)},
               "TC-DCast");
        out.type = typeGround(e.name);
        return out;
    }
    case ExprKind::SCast: {
        ExprParts out = check(*e.receiver);
        const std::string why =
            "stupid-cast target `" + e.name + "` must be unrelated to the operand";
        absorb({notSubC(typeGround(e.name), out.type, e.loc, why),
                notSubC(out.type, typeGround(e.name), e.loc, why)},
               "TC-SCast");
        out.type = typeGround(e.name);
        return out;
    }
    }
    return {}; // unreachable
}

} // namespace

CoExprResult coCheckExpr(const ExprPtr& expr, FreshSource& fresh, const CoOptions& opts) {
    ExprWalker walker(fresh, opts);
    ExprParts parts = walker.check(*expr);
    CoExprResult out;
    out.type = parts.type;
    out.context = std::move(parts.context);
    out.classReqs = std::move(parts.classReqs);
    out.peakLive = std::max(walker.peak(), out.classReqs.liveCount());
    out.solver = walker.takeState();
    return out;
}

CoMethodResult coCheckMethod(const MethodDecl& method, FreshSource& fresh,
                             const CoOptions& opts) {
    const bool norm = opts.reqs.normalizedConditions;
    ExprWalker walker(fresh, opts);
    ExprParts body = walker.check(*method.body);
    std::size_t peak = walker.peak();
    SolverState state = walker.takeState();

    // Parameters discharge the body's demands on them at their declared types.
    ContextReqs context = std::move(body.context);
    for (const Param& p : method.params) {
        ContextMergeResult step =
            removeVarReq(std::move(context), p.name, typeGround(p.type), method.loc);
        state = solveStep(std::move(state), tagged(std::move(step.constraints), "TC-Method"));
        context = std::move(step.reqs);
    }

    // `this` is pinned to a variable standing for the enclosing class.
    CoMethodResult out;
    out.enclosing = fresh.next();
    {
        ContextMergeResult step =
            removeVarReq(std::move(context), "this", typeVar(out.enclosing), method.loc);
        state = solveStep(std::move(state), tagged(std::move(step.constraints), "TC-Method"));
        context = std::move(step.reqs);
    }

    // Nothing else may be demanded of the context.
    for (const auto& entry : context)
        out.errors.push_back({method.body->loc, "TC-Method",
                              "free variable `" + entry.first + "` in the body of method `" +
                                  method.name + "`"});

    state = solveStep(
        std::move(state),
        tagged({subC(body.type, typeGround(method.returnType), method.body->loc,
                     "body of `" + method.name +
                         "` must be a subtype of the declared return type `" +
                         method.returnType + "`")},
               "TC-Method"));

    // The enclosing class extends some class; if that class (or an ancestor)
    // declares this method, the signature must match exactly.
    TypeRef superType = typeVar(fresh.next());
    std::vector<TypeRef> declaredParams;
    declaredParams.reserve(method.params.size());
    for (const Param& p : method.params)
        declaredParams.push_back(typeGround(p.type));

    ClassReqs own;
    own.insert(demand(extendsReq(typeVar(out.enclosing), superType), method.loc,
                      "required by method `" + method.name + "`"),
               state.subst, norm);
    own.insert(demand(optMethodReq(superType, method.name, std::move(declaredParams),
                                   typeGround(method.returnType)),
                      method.loc, "override compatibility of method `" + method.name + "`"),
               state.subst, norm);

    ClassMergeResult merged = mergeCR(body.classReqs, own, state.subst, opts.reqs);
    state = solveStep(std::move(state), tagged(std::move(merged.constraints), "TC-Method"));

    out.classReqs = std::move(merged.reqs);
    out.peakLive = std::max(peak, out.classReqs.liveCount());
    out.solver = std::move(state);
    return out;
}

CoClassResult coCheckClass(const ClassDecl& decl, FreshSource& fresh,
                           const CoOptions& opts) {
    CoClassResult out;
    out.freshFirst = fresh.upcoming();

    std::vector<CoMethodResult> methods;
    methods.reserve(decl.methods.size());
    for (const MethodDecl& m : decl.methods)
        methods.push_back(coCheckMethod(m, fresh, opts));

    SolverState state;
    state.normalizedConditions = opts.reqs.normalizedConditions;
    for (CoMethodResult& m : methods) {
        state = mergeSolverStates(std::move(state), m.solver);
        out.errors.insert(out.errors.end(), m.errors.begin(), m.errors.end());
        out.peakLive = std::max(out.peakLive, m.peakLive);
    }

    // Every method's enclosing-class variable is this class. Solving these
    // first grounds the receivers, so the merge below pairs cheaply.
    std::vector<Constraint> enclosingEqs;
    enclosingEqs.reserve(methods.size());
    for (std::size_t i = 0; i < methods.size(); ++i)
        enclosingEqs.push_back(eqC(typeVar(methods[i].enclosing), typeGround(decl.name),
                                   decl.methods[i].loc,
                                   "method `" + decl.methods[i].name +
                                       "` is declared in class `" + decl.name + "`"));
    state = solveStep(std::move(state), tagged(std::move(enclosingEqs), "TC-Class"));

    // The constructor's own segment must assign exactly the declared fields.
    bool ownSegmentMatches = decl.ctor.ownParams.size() == decl.fields.size();
    for (std::size_t i = 0; ownSegmentMatches && i < decl.fields.size(); ++i)
        ownSegmentMatches = decl.ctor.ownParams[i].type == decl.fields[i].type &&
                            decl.ctor.ownParams[i].name == decl.fields[i].name;
    if (!ownSegmentMatches)
        out.errors.push_back({decl.ctor.loc.known() ? decl.ctor.loc : decl.loc, "TC-Class",
                              "constructor of `" + decl.name +
                                  "` must assign exactly the declared fields, in order"});

    // The super() segment demands the superclass's full field list.
    std::vector<TypeRef> superSegment;
    superSegment.reserve(decl.ctor.superParams.size());
    for (const Param& p : decl.ctor.superParams)
        superSegment.push_back(typeGround(p.type));
    ClassReqs ctorDemand;
    ctorDemand.insert(demand(ctorReq(typeGround(decl.superName), std::move(superSegment)),
                             decl.ctor.loc.known() ? decl.ctor.loc : decl.loc,
                             "required by the constructor of `" + decl.name + "`"),
                      state.subst, opts.reqs.normalizedConditions);

    std::vector<const ClassReqs*> parts;
    parts.reserve(methods.size() + 1);
    parts.push_back(&ctorDemand);
    for (const CoMethodResult& m : methods)
        parts.push_back(&m.classReqs);
    ClassMergeResult merged = mergeCR(parts, state.subst, opts.reqs);
    state = solveStep(std::move(state), tagged(std::move(merged.constraints), "TC-Class"));

    out.solver = std::move(state);
    out.classReqs = std::move(merged.reqs);
    out.peakLive = std::max(out.peakLive, out.classReqs.liveCount());
    out.freshEnd = fresh.upcoming();
    return out;
}

SolverState mergeSolverStates(SolverState left, const SolverState& right) {
    std::vector<Constraint> replay;
    for (const auto& [var, target] : right.subst.bindings())
        replay.push_back(eqC(typeVar(var), target));
    replay.insert(replay.end(), right.deferred.begin(), right.deferred.end());
    if (right.failure)
        replay.push_back(*right.failure);
    return solveStep(std::move(left), replay);
}

CoClassResult mergeClassResults(const std::vector<const CoClassResult*>& parts,
                                const CoOptions& opts) {
    CoClassResult out;

    SolverState state;
    state.normalizedConditions = opts.reqs.normalizedConditions;
    for (const CoClassResult* part : parts) {
        state = mergeSolverStates(std::move(state), part->solver);
        out.errors.insert(out.errors.end(), part->errors.begin(), part->errors.end());
        out.peakLive = std::max(out.peakLive, part->peakLive);
        if (part->freshFirst != part->freshEnd) {
            if (out.freshFirst == out.freshEnd) {
                out.freshFirst = part->freshFirst;
                out.freshEnd = part->freshEnd;
            } else {
                out.freshFirst = std::min(out.freshFirst, part->freshFirst);
                out.freshEnd = std::max(out.freshEnd, part->freshEnd);
            }
        }
    }

    std::vector<const ClassReqs*> reqParts;
    reqParts.reserve(parts.size());
    for (const CoClassResult* part : parts)
        reqParts.push_back(&part->classReqs);
    ClassMergeResult merged = mergeCR(reqParts, state.subst, opts.reqs);
    state = solveStep(std::move(state), tagged(std::move(merged.constraints), "TC-Program"));

    out.solver = std::move(state);
    out.classReqs = std::move(merged.reqs);
    out.peakLive = std::max(out.peakLive, out.classReqs.liveCount());
    return out;
}

CoClassResult coCheckNode(const ProgramPtr& node, FreshSource& fresh,
                          const CoOptions& opts) {
    if (node->isLeaf())
        return coCheckClass(*node->decl, fresh, opts);
    std::vector<CoClassResult> children;
    children.reserve(node->children.size());
    for (const ProgramPtr& child : node->children)
        children.push_back(coCheckNode(child, fresh, opts));
    std::vector<const CoClassResult*> parts;
    parts.reserve(children.size());
    for (const CoClassResult& child : children)
        parts.push_back(&child);
    return mergeClassResults(parts, opts);
}

std::vector<ClassName> dischargeOrder(const ClassTable& table) {
    SubclassRelation sigma = projectExtends(table);
    auto depth = [&](const ClassName& c) {
        int d = 0;
        ClassName cur = c;
        while (true) {
            auto it = sigma.parent.find(cur);
            if (it == sigma.parent.end())
                break;
            cur = it->second;
            ++d;
        }
        return d;
    };
    std::vector<ClassName> order = table.classNames();
    std::stable_sort(order.begin(), order.end(),
                     [&](const ClassName& a, const ClassName& b) {
                         int da = depth(a), db = depth(b);
                         if (da != db)
                             return da > db;
                         return a < b;
                     });
    return order;
}

DischargeResult dischargeAll(const ClassTable& table, SolverState state, ClassReqs reqs,
                             const CoOptions& opts) {
    DischargeResult out;
    // Each removal's equations chase each other to a batch-local fixpoint,
    // but constraints deferred earlier stay asleep until finalize(): waking
    // them here only re-derives what finalize decides anyway, and the
    // residual policy reads conditions under the final substitution.
    auto step = [&](RemoveResult r) {
        state = solveStep(std::move(state), tagged(std::move(r.constraints), "TC-Program"),
                          /*wakeDeferred=*/false);
        reqs = std::move(r.reqs);
        out.peakLive = std::max(out.peakLive, reqs.liveCount());
    };
    const AncestryIndex above = buildAncestryIndex(table);

    for (const ClassName& cls : dischargeOrder(table)) {
        const ClassDecl* decl = table.declOf(cls);
        step(removeMethods(cls, decl->methods, std::move(reqs), state.subst, opts.reqs));
        step(removeFields(cls, decl->fields, std::move(reqs), state.subst, opts.reqs));
        step(removeCtor(cls, *table.ctorParams(cls), std::move(reqs), state.subst,
                        opts.reqs));
        step(removeExt(cls, decl->superName, std::move(reqs), state.subst, opts.reqs,
                       &above));
    }
    // Object is built in: no members, no superclass, a nullary constructor.
    step(removeCtor("Object", {}, std::move(reqs), state.subst, opts.reqs));

    out.solver = std::move(state);
    out.residual = std::move(reqs);
    return out;
}

CoProgramResult finishProgram(CoClassResult merged, const ProgramPtr& program,
                              const CoOptions& opts) {
    CoProgramResult out;
    out.peakLive = merged.peakLive;

    // The same well-formedness gate as the reference checker: a malformed
    // table rejects before any requirement is discharged.
    ClassTableResult built = buildClassTable(program);
    if (!built.ok()) {
        out.verdict.accepted = false;
        out.verdict.errors = std::move(built.errors);
        out.subst = merged.solver.subst;
        out.residual = std::move(merged.classReqs);
        return out;
    }

    out.verdict.errors = std::move(merged.errors);

    DischargeResult folded = dischargeAll(built.table, std::move(merged.solver),
                                          std::move(merged.classReqs), opts);
    out.peakLive = std::max(out.peakLive, folded.peakLive);
    SolverState state = std::move(folded.solver);

    FinalizeResult fin = finalize(state, projectExtends(built.table));
    out.subst = fin.ok ? fin.subst : state.subst;
    out.residual = std::move(folded.residual);

    if (!fin.ok) {
        Diagnostic d;
        d.rule = "TC-Program";
        d.message = "constraint solving failed";
        if (fin.violated) {
            const Constraint& bad = *fin.violated;
            d.loc = bad.loc;
            if (!bad.rule.empty())
                d.rule = bad.rule;
            Constraint shown = applySubst(state.subst, bad, state.normalizedConditions);
            shown = VarCanon{}.constraint(std::move(shown));
            d.message = (bad.note.empty() ? std::string("unsatisfiable constraint") : bad.note) +
                        " (" + renderConstraint(shown) + ")";
        }
        out.verdict.errors.push_back(std::move(d));
    } else {
        // Every surviving non-optional demand names a missing declaration.
        for (const ReqEntry& e : out.residual.entries()) {
            if (e.req.kind == ReqKind::OptMethod)
                continue;
            if (evalCondition(e.cond, out.subst) == CondEval::Fails)
                continue;
            std::string message =
                "unmet requirement " +
                renderClassReq(VarCanon{}.req(resolveReq(out.subst, e.req)));
            if (!e.note.empty())
                message += " (" + e.note + ")";
            out.verdict.errors.push_back({e.loc, "TC-Program", std::move(message)});
        }
    }
    out.verdict.accepted = out.verdict.errors.empty();
    return out;
}

CoProgramResult coCheckProgram(const ProgramPtr& program, const CoOptions& opts) {
    FreshSource fresh(freshSeedFromEnv());
    CoClassResult merged = coCheckNode(program, fresh, opts);
    return finishProgram(std::move(merged), program, opts);
}

} // namespace cocofj
