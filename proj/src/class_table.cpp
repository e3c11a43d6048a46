#include "cocofj/class_table.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cocofj {

bool ClassTable::declared(const ClassName& cls) const {
    return cls == "Object" || byName_.count(cls) > 0;
}

const ClassDecl* ClassTable::declOf(const ClassName& cls) const {
    auto it = byName_.find(cls);
    return it == byName_.end() ? nullptr : it->second.decl.get();
}

const MethodDecl* ClassTable::ownMethod(const ClassName& cls, const std::string& name) const {
    auto it = byName_.find(cls);
    if (it == byName_.end())
        return nullptr;
    auto mit = it->second.method.find(name);
    return mit == it->second.method.end() ? nullptr : mit->second;
}

std::optional<ClassName> ClassTable::ownField(const ClassName& cls,
                                              const std::string& name) const {
    auto it = byName_.find(cls);
    if (it == byName_.end())
        return std::nullopt;
    auto fit = it->second.fieldType.find(name);
    if (fit == it->second.fieldType.end())
        return std::nullopt;
    return fit->second;
}

std::optional<std::vector<ClassName>> ClassTable::ctorParams(const ClassName& cls) const {
    if (cls == "Object")
        return std::vector<ClassName>{};
    auto it = byName_.find(cls);
    if (it == byName_.end())
        return std::nullopt;
    std::vector<ClassName> types;
    for (const Param& p : it->second.decl->ctor.superParams)
        types.push_back(p.type);
    for (const Param& p : it->second.decl->ctor.ownParams)
        types.push_back(p.type);
    return types;
}

void ClassTable::add(ClassDeclPtr decl) {
    Entry entry;
    entry.decl = decl;
    for (const Param& f : decl->fields)
        entry.fieldType.emplace(f.name, f.type);
    for (const MethodDecl& m : decl->methods)
        entry.method.emplace(m.name, &m);
    order_.push_back(decl->name);
    byName_.emplace(decl->name, std::move(entry));
}

ClassTableResult buildClassTable(const ProgramPtr& program) {
    ClassTableResult result;
    auto report = [&result](SourceLoc loc, std::string message) {
        result.errors.push_back({loc, "class-table", std::move(message)});
    };

    std::vector<ClassDeclPtr> decls = leaves(program);
    for (const ClassDeclPtr& decl : decls) {
        if (decl->name == "Object") {
            report(decl->loc, "class `Object` is built in and cannot be declared");
            continue;
        }
        if (result.table.declared(decl->name)) {
            report(decl->loc, "duplicate class name `" + decl->name + "`");
            continue;
        }
        std::set<std::string> fieldNames;
        for (const Param& f : decl->fields)
            if (!fieldNames.insert(f.name).second)
                report(decl->loc, "duplicate field `" + f.name + "` in class `" +
                                      decl->name + "`");
        std::set<std::string> methodNames;
        for (const MethodDecl& m : decl->methods)
            if (!methodNames.insert(m.name).second)
                report(m.loc, "duplicate method `" + m.name + "` in class `" + decl->name +
                                  "`");
        result.table.add(decl);
    }

    // Cycle detection along parent chains (unknown supers end a chain).
    enum { Unvisited = 0, OnPath, Safe, Cyclic };
    std::map<ClassName, int> state;
    for (const ClassName& start : result.table.classNames()) {
        if (state[start] != Unvisited)
            continue;
        std::vector<ClassName> path;
        ClassName at = start;
        int outcome = Safe;
        while (result.table.declOf(at) && state[at] != Safe) {
            if (state[at] == OnPath) {
                report(result.table.declOf(at)->loc,
                       "inheritance cycle through class `" + at + "`");
                outcome = Cyclic;
                break;
            }
            if (state[at] == Cyclic) {
                outcome = Cyclic; // feeds an already-reported cycle
                break;
            }
            state[at] = OnPath;
            path.push_back(at);
            at = result.table.declOf(at)->superName;
        }
        for (const ClassName& cls : path)
            state[cls] = outcome;
    }
    if (!result.errors.empty())
        return result;

    // No field shadowing: a declared field must not also exist in an ancestor.
    for (const ClassName& cls : result.table.classNames()) {
        const ClassDecl* decl = result.table.declOf(cls);
        for (const Param& f : decl->fields) {
            ClassName ancestor = decl->superName;
            while (const ClassDecl* up = result.table.declOf(ancestor)) {
                if (result.table.ownField(ancestor, f.name)) {
                    report(decl->loc, "field `" + f.name + "` of class `" + cls +
                                          "` shadows a field of ancestor `" + ancestor + "`");
                    break;
                }
                ancestor = up->superName;
            }
        }
    }
    return result;
}

std::optional<ClassName> fieldLookup(const std::string& f, const ClassName& cls,
                                     const ClassTable& table) {
    ClassName at = cls;
    while (const ClassDecl* decl = table.declOf(at)) {
        if (std::optional<ClassName> type = table.ownField(at, f))
            return type;
        at = decl->superName;
    }
    return std::nullopt;
}

std::optional<CtorSig> fieldsLookup(const ClassName& cls, const ClassTable& table) {
    std::vector<ClassName> chain;
    ClassName at = cls;
    while (at != "Object") {
        const ClassDecl* decl = table.declOf(at);
        if (!decl)
            return std::nullopt; // undeclared class somewhere on the chain
        chain.push_back(at);
        at = decl->superName;
    }
    CtorSig sig;
    sig.cls = cls;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        for (const Param& f : table.declOf(*it)->fields)
            sig.paramTypes.push_back(f.type);
    return sig;
}

std::optional<MethodSig> mtypeLookup(const std::string& m, const ClassName& cls,
                                     const ClassTable& table) {
    ClassName at = cls;
    while (const ClassDecl* decl = table.declOf(at)) {
        if (const MethodDecl* found = table.ownMethod(at, m)) {
            MethodSig sig;
            for (const Param& p : found->params)
                sig.params.push_back(p.type);
            sig.ret = found->returnType;
            return sig;
        }
        at = decl->superName;
    }
    return std::nullopt;
}

std::optional<ClassName> extendsLookup(const ClassName& cls, const ClassTable& table) {
    const ClassDecl* decl = table.declOf(cls);
    if (!decl)
        return std::nullopt;
    return decl->superName;
}

SubclassRelation projectExtends(const ClassTable& table) {
    SubclassRelation sigma;
    for (const ClassName& cls : table.classNames())
        sigma.parent.emplace(cls, table.declOf(cls)->superName);
    return sigma;
}

SubclassRelation projectExtends(const ProgramPtr& program) {
    SubclassRelation sigma;
    for (const ClassDeclPtr& decl : leaves(program))
        sigma.parent.emplace(decl->name, decl->superName);
    return sigma;
}

bool isSubtype(const SubclassRelation& sigma, const ClassName& c, const ClassName& d) {
    ClassName at = c;
    std::set<ClassName> seen;
    while (true) {
        if (at == d)
            return true;
        if (!seen.insert(at).second)
            return false; // defensive: cyclic Σ never reaches d twice
        auto it = sigma.parent.find(at);
        if (it == sigma.parent.end())
            return false;
        at = it->second;
    }
}

std::string dumpClauses(const ClassTable& table) {
    std::vector<std::string> lines;
    auto sigText = [](const std::vector<ClassName>& params, const ClassName* ret) {
        std::string out = "(";
        for (size_t i = 0; i < params.size(); ++i) {
            if (i)
                out += ", ";
            out += params[i];
        }
        out += ")";
        if (ret)
            out += " -> " + *ret;
        return out;
    };
    for (const ClassName& cls : table.classNames()) {
        const ClassDecl* decl = table.declOf(cls);
        lines.push_back("Extends(" + cls + ", " + decl->superName + ")");
        lines.push_back("Ctor(" + cls + ", " + sigText(*table.ctorParams(cls), nullptr) + ")");
        for (const Param& f : decl->fields)
            lines.push_back("Field(" + cls + ", " + f.name + ", " + f.type + ")");
        for (const MethodDecl& m : decl->methods) {
            std::vector<ClassName> params;
            for (const Param& p : m.params)
                params.push_back(p.type);
            lines.push_back("Method(" + cls + ", " + m.name + ", " +
                            sigText(params, &m.returnType) + ")");
        }
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const std::string& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace cocofj
