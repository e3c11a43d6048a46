#include "cocofj/contextual.hpp"

#include <sstream>

namespace cocofj {

bool subtypeInTable(const ClassTable& table, const ClassName& c, const ClassName& d) {
    ClassName at = c;
    while (true) {
        if (at == d)
            return true;
        const ClassDecl* decl = table.declOf(at);
        if (!decl)
            return false;
        at = decl->superName;
    }
}

namespace {

std::string typeList(const std::vector<ClassName>& types) {
    std::string out = "(";
    for (size_t i = 0; i < types.size(); ++i) {
        if (i)
            out += ", ";
        out += types[i];
    }
    return out + ")";
}

void fail(std::vector<Diagnostic>& errors, SourceLoc loc, std::string rule,
          std::string message) {
    errors.push_back({loc, std::move(rule), std::move(message)});
}

// Checks the argument list of a call or instantiation against the expected
// parameter types. Returns false after appending at most one diagnostic.
bool checkArgs(const TypingContext& gamma, const ClassTable& table,
               const std::vector<ExprPtr>& args, const std::vector<ClassName>& expected,
               const Expr& site, const std::string& rule, const std::string& what,
               std::vector<Diagnostic>& errors) {
    if (args.size() != expected.size()) {
        fail(errors, site.loc, rule,
             what + " expects " + std::to_string(expected.size()) + " argument(s), got " +
                 std::to_string(args.size()));
        return false;
    }
    for (size_t i = 0; i < args.size(); ++i) {
        std::optional<ClassName> at = checkExpr(gamma, table, *args[i], errors);
        if (!at)
            return false;
        if (!subtypeInTable(table, *at, expected[i])) {
            fail(errors, args[i]->loc, rule,
                 "argument " + std::to_string(i + 1) + " of " + what + " has type `" + *at +
                     "`, which is not a subtype of `" + expected[i] + "`");
            return false;
        }
    }
    return true;
}

} // namespace

std::optional<ClassName> checkExpr(const TypingContext& gamma, const ClassTable& table,
                                   const Expr& e, std::vector<Diagnostic>& errors) {
    switch (e.kind) {
    case ExprKind::Var: {
        auto it = gamma.find(e.name);
        if (it == gamma.end()) {
            fail(errors, e.loc, "T-Var", "unbound variable `" + e.name + "`");
            return std::nullopt;
        }
        return it->second;
    }
    case ExprKind::This: {
        auto it = gamma.find("this");
        if (it == gamma.end()) {
            fail(errors, e.loc, "T-Var", "`this` is not bound in this context");
            return std::nullopt;
        }
        return it->second;
    }
    case ExprKind::FieldAccess: {
        std::optional<ClassName> recv = checkExpr(gamma, table, *e.receiver, errors);
        if (!recv)
            return std::nullopt;
        std::optional<ClassName> type = fieldLookup(e.name, *recv, table);
        if (!type) {
            fail(errors, e.loc, "T-Field",
                 "class `" + *recv + "` has no field `" + e.name + "`");
            return std::nullopt;
        }
        return type;
    }
    case ExprKind::Invoke: {
        std::optional<ClassName> recv = checkExpr(gamma, table, *e.receiver, errors);
        if (!recv)
            return std::nullopt;
        std::optional<MethodSig> sig = mtypeLookup(e.name, *recv, table);
        if (!sig) {
            fail(errors, e.loc, "T-Invk",
                 "class `" + *recv + "` has no method `" + e.name + "`");
            return std::nullopt;
        }
        if (!checkArgs(gamma, table, e.args, sig->params, e, "T-Invk",
                       "method `" + e.name + "`", errors))
            return std::nullopt;
        return sig->ret;
    }
    case ExprKind::New: {
        std::optional<CtorSig> fields = fieldsLookup(e.name, table);
        if (!fields) {
            fail(errors, e.loc, "T-New",
                 "cannot instantiate `" + e.name + "`: class or an ancestor is undeclared");
            return std::nullopt;
        }
        if (!checkArgs(gamma, table, e.args, fields->paramTypes, e, "T-New",
                       "constructor of `" + e.name + "`", errors))
            return std::nullopt;
        return e.name;
    }
    case ExprKind::UCast: {
        std::optional<ClassName> from = checkExpr(gamma, table, *e.receiver, errors);
        if (!from)
            return std::nullopt;
        if (!subtypeInTable(table, *from, e.name)) {
            fail(errors, e.loc, "T-UCast",
                 "upcast target `" + e.name + "` is not a supertype of `" + *from + "`");
            return std::nullopt;
        }
        return e.name;
    }
    case ExprKind::DCast: {
        std::optional<ClassName> from = checkExpr(gamma, table, *e.receiver, errors);
        if (!from)
            return std::nullopt;
        if (e.name == *from || !subtypeInTable(table, e.name, *from)) {
            fail(errors, e.loc, "T-DCast",
                 "downcast target `" + e.name + "` is not a proper subtype of `" + *from +
                     "`");
            return std::nullopt;
        }
        return e.name;
    }
    case ExprKind::SCast: {
        std::optional<ClassName> from = checkExpr(gamma, table, *e.receiver, errors);
        if (!from)
            return std::nullopt;
        if (subtypeInTable(table, e.name, *from) || subtypeInTable(table, *from, e.name)) {
            fail(errors, e.loc, "T-SCast",
                 "stupid-cast target `" + e.name + "` is related to `" + *from + "`");
            return std::nullopt;
        }
        return e.name;
    }
    }
    return std::nullopt; // unreachable
}

bool checkMethod(const ClassName& cls, const ClassTable& table, const MethodDecl& method,
                 std::vector<Diagnostic>& errors) {
    size_t before = errors.size();

    // Override premise: if the superclass knows this method, the signature
    // must be identical.
    const ClassDecl* decl = table.declOf(cls);
    if (decl) {
        if (std::optional<MethodSig> inherited =
                mtypeLookup(method.name, decl->superName, table)) {
            MethodSig own;
            for (const Param& p : method.params)
                own.params.push_back(p.type);
            own.ret = method.returnType;
            if (!(own == *inherited)) {
                fail(errors, method.loc, "T-Method",
                     "method `" + method.name + "` in class `" + cls +
                         "` overrides an inherited method with a different signature");
            }
        }
    }

    TypingContext gamma;
    gamma.emplace("this", cls);
    for (const Param& p : method.params)
        gamma.emplace(p.name, p.type);
    std::optional<ClassName> bodyType = checkExpr(gamma, table, *method.body, errors);
    if (bodyType && !subtypeInTable(table, *bodyType, method.returnType)) {
        fail(errors, method.body->loc, "T-Method",
             "body of `" + method.name + "` has type `" + *bodyType +
                 "`, which is not a subtype of the declared return type `" +
                 method.returnType + "`");
    }
    return errors.size() == before;
}

bool checkClass(const ClassTable& table, const ClassDecl& decl,
                std::vector<Diagnostic>& errors) {
    size_t before = errors.size();

    std::optional<CtorSig> superFields = fieldsLookup(decl.superName, table);
    if (!superFields) {
        fail(errors, decl.loc, "T-Class",
             "class `" + decl.name + "` extends `" + decl.superName +
                 "`, which is not fully declared");
    } else {
        std::vector<ClassName> superTypes;
        for (const Param& p : decl.ctor.superParams)
            superTypes.push_back(p.type);
        if (superTypes != superFields->paramTypes) {
            fail(errors, decl.ctor.loc.known() ? decl.ctor.loc : decl.loc, "T-Class",
                 "constructor of `" + decl.name + "` passes " + typeList(superTypes) +
                     " to super, but `" + decl.superName + "` requires " +
                     typeList(superFields->paramTypes));
        }
    }

    bool ownSegmentMatches = decl.ctor.ownParams.size() == decl.fields.size();
    for (size_t i = 0; ownSegmentMatches && i < decl.fields.size(); ++i)
        ownSegmentMatches = decl.ctor.ownParams[i].type == decl.fields[i].type &&
                            decl.ctor.ownParams[i].name == decl.fields[i].name;
    if (!ownSegmentMatches) {
        fail(errors, decl.ctor.loc.known() ? decl.ctor.loc : decl.loc, "T-Class",
             "constructor of `" + decl.name +
                 "` must assign exactly the declared fields, in order");
    }

    for (const MethodDecl& method : decl.methods)
        checkMethod(decl.name, table, method, errors);
    return errors.size() == before;
}

Verdict checkProgram(const ProgramPtr& program) {
    Verdict verdict;
    ClassTableResult built = buildClassTable(program);
    if (!built.ok()) {
        verdict.accepted = false;
        verdict.errors = std::move(built.errors);
        return verdict;
    }
    for (const ClassDeclPtr& decl : leaves(program))
        checkClass(built.table, *decl, verdict.errors);
    verdict.accepted = verdict.errors.empty();
    return verdict;
}

} // namespace cocofj
