#include "cocofj/synth.hpp"

#include <map>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "cocofj/contextual.hpp"

namespace cocofj {

const char* schemeName(Scheme scheme) {
    switch (scheme) {
    case Scheme::AccumSuper: return "super";
    case Scheme::AccumPrev: return "prev";
    case Scheme::AccumPrevSuper: return "prevsuper";
    }
    return "?";
}

const char* namingName(Naming naming) {
    switch (naming) {
    case Naming::Unique: return "unique";
    case Naming::Mirrored: return "mirrored";
    case Naming::Override: return "override";
    case Naming::MirOver: return "mirover";
    }
    return "?";
}

std::optional<Scheme> schemeFromName(const std::string& name) {
    if (name == "super") return Scheme::AccumSuper;
    if (name == "prev") return Scheme::AccumPrev;
    if (name == "prevsuper") return Scheme::AccumPrevSuper;
    return std::nullopt;
}

std::optional<Naming> namingFromName(const std::string& name) {
    if (name == "unique") return Naming::Unique;
    if (name == "mirrored") return Naming::Mirrored;
    if (name == "override") return Naming::Override;
    if (name == "mirover") return Naming::MirOver;
    return std::nullopt;
}

int classCount(const SynthConfig& config) {
    return config.rootClasses * ((1 << config.height) - 1) + 3;
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

// Hierarchy classes are laid out heap-style: position 1 is the root, position
// p's children are 2p and 2p+1, so p/2 names the superclass.

std::string hierClassName(int hier, int pos) {
    return "C" + std::to_string(hier) + "_" + std::to_string(pos);
}

// Field names must stay unique along each inheritance chain (FJ forbids
// shadowing), so only the hierarchy axis of the naming scheme applies.
std::string natFieldName(Naming naming, int hier, int pos) {
    if (naming == Naming::Mirrored || naming == Naming::MirOver)
        return "f" + std::to_string(pos);
    return "f" + std::to_string(hier) + "_" + std::to_string(pos);
}

std::string prevFieldName(Naming naming, int hier, int pos) {
    if (naming == Naming::Mirrored || naming == Naming::MirOver)
        return "q" + std::to_string(pos);
    return "q" + std::to_string(hier) + "_" + std::to_string(pos);
}

std::string methodName(Naming naming, int hier, int pos) {
    switch (naming) {
    case Naming::Unique: return "m" + std::to_string(hier) + "_" + std::to_string(pos);
    case Naming::Mirrored: return "m" + std::to_string(pos);
    case Naming::Override: return "m" + std::to_string(hier);
    case Naming::MirOver: return "m";
    }
    return "m";
}

ExprPtr plusCall(ExprPtr acc, ExprPtr operand) {
    return makeInvoke(std::move(acc), "plus", {std::move(operand)});
}

ClassDeclPtr hierClass(const SynthConfig& config, int hier, int pos,
                       const std::vector<Param>& inherited) {
    bool wantPrev = (config.scheme == Scheme::AccumPrev ||
                     config.scheme == Scheme::AccumPrevSuper) &&
                    hier > 1;
    bool wantSuper = (config.scheme == Scheme::AccumSuper ||
                      config.scheme == Scheme::AccumPrevSuper) &&
                     pos > 1;

    auto decl = std::make_shared<ClassDecl>();
    decl->name = hierClassName(hier, pos);
    decl->superName = pos == 1 ? "Object" : hierClassName(hier, pos / 2);

    std::string nat = natFieldName(config.naming, hier, pos);
    decl->fields.push_back({"Nat", nat});
    if (wantPrev)
        decl->fields.push_back({hierClassName(hier - 1, pos),
                                prevFieldName(config.naming, hier, pos)});

    decl->ctor.superParams = inherited;
    decl->ctor.ownParams = decl->fields;

    // The accumulator: start from the own field, then pull in the super
    // chain's number and/or the previous hierarchy's number.
    ExprPtr body = makeFieldAccess(makeThis(), nat);
    if (wantSuper)
        body = plusCall(std::move(body),
                        makeInvoke(makeThis(), methodName(config.naming, hier, pos / 2), {}));
    if (wantPrev)
        body = plusCall(std::move(body),
                        makeInvoke(makeFieldAccess(makeThis(),
                                                   prevFieldName(config.naming, hier, pos)),
                                   methodName(config.naming, hier - 1, pos), {}));

    decl->methods.push_back({"Nat", methodName(config.naming, hier, pos), {}, body, {}});
    return decl;
}

const char* kNatTrio = R"(
class Nat extends Object {
  Nat() { super(); }
  Nat plus(Nat other) { return other; }
}
class Zero extends Nat {
  Zero() { super(); }
  Nat plus(Nat other) { return other; }
}
class Succ extends Nat {
  Nat pred;
  Succ(Nat pred) { super(); this.pred = pred; }
  Nat plus(Nat other) { return new Succ(this.pred.plus(other)); }
}
)";

} // namespace

ProgramPtr synthesize(const SynthConfig& config) {
    ParseResult trio = parseProgram(kNatTrio);
    std::vector<ProgramPtr> natLeaves;
    for (const ClassDeclPtr& decl : leaves(trio.program))
        natLeaves.push_back(makeLeaf(decl));

    std::vector<ProgramPtr> children;
    children.push_back(makeGroup(std::move(natLeaves)));

    int positions = (1 << config.height) - 1;
    for (int hier = 1; hier <= config.rootClasses; ++hier) {
        std::vector<ClassDeclPtr> decls(static_cast<std::size_t>(positions));
        std::vector<std::vector<Param>> paramsAt(static_cast<std::size_t>(positions) + 1);
        for (int pos = 1; pos <= positions; ++pos) {
            const std::vector<Param>& inherited =
                pos == 1 ? paramsAt[0] : paramsAt[static_cast<std::size_t>(pos / 2)];
            ClassDeclPtr decl = hierClass(config, hier, pos, inherited);
            std::vector<Param> full = inherited;
            full.insert(full.end(), decl->fields.begin(), decl->fields.end());
            paramsAt[static_cast<std::size_t>(pos)] = std::move(full);
            decls[static_cast<std::size_t>(pos - 1)] = std::move(decl);
        }
        children.push_back(balance(decls, 2));
    }
    return makeGroup(std::move(children));
}

// ---------------------------------------------------------------------------
// Mutation

namespace {

struct FaultGen {
    std::mt19937_64 rng;

    explicit FaultGen(std::uint64_t seed) : rng(seed) {}

    std::size_t pick(std::size_t bound) {
        return static_cast<std::size_t>(rng() % bound);
    }
};

ProgramPtr replaceLeaf(const ProgramPtr& node, const ClassName& name,
                       const ClassDeclPtr& with) {
    if (node->isLeaf())
        return node->decl->name == name ? makeLeaf(with) : node;
    std::vector<ProgramPtr> children;
    children.reserve(node->children.size());
    bool changed = false;
    for (const ProgramPtr& child : node->children) {
        ProgramPtr out = replaceLeaf(child, name, with);
        changed = changed || out != child;
        children.push_back(std::move(out));
    }
    return changed ? makeGroup(std::move(children)) : node;
}

// (declIndex, methodIndex) pairs whose method name is also declared somewhere
// up the superclass chain inside the program — the override sites.
std::vector<std::pair<std::size_t, std::size_t>>
overrideSites(const std::vector<ClassDeclPtr>& decls) {
    std::map<ClassName, const ClassDecl*> byName;
    for (const ClassDeclPtr& d : decls)
        byName[d->name] = d.get();

    std::vector<std::pair<std::size_t, std::size_t>> sites;
    for (std::size_t i = 0; i < decls.size(); ++i) {
        for (std::size_t j = 0; j < decls[i]->methods.size(); ++j) {
            const std::string& name = decls[i]->methods[j].name;
            for (auto it = byName.find(decls[i]->superName); it != byName.end();
                 it = byName.find(it->second->superName)) {
                bool declares = false;
                for (const MethodDecl& m : it->second->methods)
                    declares = declares || m.name == name;
                if (declares) {
                    sites.emplace_back(i, j);
                    break;
                }
            }
        }
    }
    return sites;
}

std::string retypeTarget(const std::string& current,
                         const std::vector<ClassDeclPtr>& decls, FaultGen& gen) {
    std::vector<std::string> pool = {"Object", "Nat", "Zero", "Succ"};
    for (const ClassDeclPtr& d : decls)
        pool.push_back(d->name);
    std::string chosen = pool[gen.pick(pool.size())];
    if (chosen == current)
        chosen = current == "Object" ? "Zero" : "Object";
    return chosen;
}

} // namespace

Mutation mutate(const ProgramPtr& program, std::uint64_t seed) {
    FaultGen gen(seed);
    std::vector<ClassDeclPtr> decls = leaves(program);

    std::vector<std::size_t> withMethods;
    for (std::size_t i = 0; i < decls.size(); ++i)
        if (!decls[i]->methods.empty())
            withMethods.push_back(i);

    Mutation out;
    out.program = program;
    out.description = "identity";

    std::size_t kind = gen.pick(7);
    if (kind == 4 && overrideSites(decls).empty())
        kind = 1;
    if (kind != 0 && kind != 3 && withMethods.empty())
        kind = 3;

    switch (kind) {
    case 0:
        break;
    case 1: { // return type no longer matches the body
        std::size_t at = withMethods[gen.pick(withMethods.size())];
        auto copy = std::make_shared<ClassDecl>(*decls[at]);
        MethodDecl& m = copy->methods[gen.pick(copy->methods.size())];
        m.returnType = retypeTarget(m.returnType, decls, gen);
        out.description = "retype return of " + copy->name + "." + m.name + " to " +
                          m.returnType;
        out.program = replaceLeaf(program, copy->name, copy);
        break;
    }
    case 2: { // drop a method others may call
        std::size_t at = withMethods[gen.pick(withMethods.size())];
        auto copy = std::make_shared<ClassDecl>(*decls[at]);
        std::size_t m = gen.pick(copy->methods.size());
        out.description = "delete " + copy->name + "." + copy->methods[m].name;
        copy->methods.erase(copy->methods.begin() +
                            static_cast<std::ptrdiff_t>(m));
        out.program = replaceLeaf(program, copy->name, copy);
        break;
    }
    case 3: { // constructor arity drifts from the declared fields
        std::size_t at = gen.pick(decls.size());
        auto copy = std::make_shared<ClassDecl>(*decls[at]);
        if (!copy->ctor.ownParams.empty())
            copy->ctor.ownParams.pop_back();
        else
            copy->ctor.ownParams.push_back({"Nat", "extra"});
        out.description = "constructor arity of " + copy->name;
        out.program = replaceLeaf(program, copy->name, copy);
        break;
    }
    case 4: { // override signature diverges from the superclass
        auto sites = overrideSites(decls);
        auto [at, mi] = sites[gen.pick(sites.size())];
        auto copy = std::make_shared<ClassDecl>(*decls[at]);
        MethodDecl& m = copy->methods[mi];
        if (!m.params.empty())
            m.params[0].type = m.params[0].type == "Nat" ? "Object" : "Nat";
        else
            m.returnType = m.returnType == "Nat" ? "Object" : "Nat";
        out.description = "override signature of " + copy->name + "." + m.name;
        out.program = replaceLeaf(program, copy->name, copy);
        break;
    }
    case 5: { // body mentions a variable no parameter binds
        std::size_t at = withMethods[gen.pick(withMethods.size())];
        auto copy = std::make_shared<ClassDecl>(*decls[at]);
        MethodDecl& m = copy->methods[gen.pick(copy->methods.size())];
        m.body = makeVar("ghostling");
        out.description = "unbound variable in " + copy->name + "." + m.name;
        out.program = replaceLeaf(program, copy->name, copy);
        break;
    }
    default: { // a cast sold as an upcast that no subtyping supports
        std::size_t at = withMethods[gen.pick(withMethods.size())];
        auto copy = std::make_shared<ClassDecl>(*decls[at]);
        MethodDecl& m = copy->methods[gen.pick(copy->methods.size())];
        std::string target = "Succ";
        ExprPtr operand = makeNew("Nat", {});
        for (const ClassDeclPtr& d : decls)
            if (d->name != "Nat" && d->name != "Zero" && d->name != "Succ") {
                target = d->name;
                operand = makeNew("Zero", {});
                break;
            }
        m.body = makeCast(ExprKind::UCast, target, std::move(operand));
        out.description = "upcast to unrelated " + target + " in " + copy->name +
                          "." + m.name;
        out.program = replaceLeaf(program, copy->name, copy);
        break;
    }
    }

    out.expectAccept = checkProgram(out.program).accepted;
    return out;
}

} // namespace cocofj
