#include "cocofj/incremental.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cocofj/class_table.hpp"

namespace cocofj {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Class facts

ClassFacts classFactsOf(const ProgramPtr& node) {
    ClassTable table;
    for (const ClassDeclPtr& decl : leaves(node))
        table.add(decl);
    ClassFacts facts;
    std::istringstream dump(dumpClauses(table));
    for (std::string line; std::getline(dump, line);)
        facts.clauses.push_back(std::move(line));
    return facts;
}

// ---------------------------------------------------------------------------
// Checking walk

namespace {

struct RecheckWalk {
    MemoTable& memo;
    FreshSource fresh;
    const CoOptions& opts;
    std::size_t recomputed = 0;
    std::size_t reused = 0;

    CoClassResult walk(const ProgramPtr& node) {
        std::string key = nodeKey(node);
        if (auto it = memo.entries.find(key); it != memo.entries.end()) {
            ++reused;
            return it->second.result;
        }

        ++recomputed;
        CoClassResult result;
        if (node->isLeaf()) {
            result = coCheckClass(*node->decl, fresh, opts);
        } else {
            std::vector<CoClassResult> children;
            children.reserve(node->children.size());
            for (const ProgramPtr& child : node->children)
                children.push_back(walk(child));
            std::vector<const CoClassResult*> parts;
            parts.reserve(children.size());
            for (const CoClassResult& child : children)
                parts.push_back(&child);
            result = mergeClassResults(parts, opts);
        }
        memo.entries.emplace(std::move(key), MemoEntry{result, classFactsOf(node)});
        return result;
    }
};

} // namespace

IncrementalOutcome recheck(MemoTable memo, const ProgramPtr& program,
                           const CoOptions& opts) {
    IncrementalOutcome out;
    RecheckWalk pass{memo, FreshSource(memo.nextFresh), opts, 0, 0};
    CoClassResult root = pass.walk(program);
    memo.nextFresh = std::max(memo.nextFresh, pass.fresh.upcoming());

    out.recomputedNodes = pass.recomputed;
    out.reusedNodes = pass.reused;
    out.result = finishProgram(std::move(root), program, opts);
    out.memo = std::move(memo);
    return out;
}

IncrementalOutcome initialCheck(const ProgramPtr& program, const CoOptions& opts) {
    return recheck(MemoTable{}, program, opts);
}

bool invalidate(MemoTable& memo, const ProgramPtr& program,
                const std::vector<int>& path) {
    std::vector<ProgramPtr> chain;
    chain.reserve(path.size() + 1);
    ProgramPtr at = program;
    chain.push_back(at);
    for (int index : path) {
        if (at->isLeaf() || index < 0 ||
            static_cast<std::size_t>(index) >= at->children.size())
            return false;
        at = at->children[static_cast<std::size_t>(index)];
        chain.push_back(at);
    }
    for (const ProgramPtr& node : chain)
        memo.entries.erase(nodeKey(node));
    return true;
}

std::optional<std::vector<int>> pathToClass(const ProgramPtr& program,
                                            const ClassName& cls) {
    if (program->isLeaf()) {
        if (program->decl->name == cls)
            return std::vector<int>{};
        return std::nullopt;
    }
    for (std::size_t i = 0; i < program->children.size(); ++i) {
        if (auto sub = pathToClass(program->children[i], cls)) {
            sub->insert(sub->begin(), static_cast<int>(i));
            return sub;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Session cache file

namespace {

constexpr const char* kCacheFormat = "cocofj-memo";
constexpr int kCacheVersion = 1;

json typeToJson(const TypeRef& t) {
    if (t.isVar())
        return json{{"v", t.var}};
    return json{{"g", t.ground}};
}

TypeRef typeFromJson(const json& j) {
    if (j.contains("v"))
        return typeVar(j.at("v").get<ClassVar>());
    return typeGround(j.at("g").get<std::string>());
}

json locToJson(const SourceLoc& loc) {
    return json::array({loc.line, loc.column});
}

SourceLoc locFromJson(const json& j) {
    return {j.at(0).get<int>(), j.at(1).get<int>()};
}

json condToJson(const Condition& c) {
    return json{{"r", typeToJson(c.receiver)}, {"ng", c.notGround},
                {"nv", c.notVar},             {"sv", c.sameVar},
                {"al", c.sameGroundAlternatives}, {"u", c.unsatisfiable},
                {"eg", c.eqGroundRaw}};
}

Condition condFromJson(const json& j) {
    Condition c;
    c.receiver = typeFromJson(j.at("r"));
    c.notGround = j.at("ng").get<std::set<ClassName>>();
    c.notVar = j.at("nv").get<std::set<ClassVar>>();
    c.sameVar = j.at("sv").get<std::set<ClassVar>>();
    c.sameGroundAlternatives = j.at("al").get<std::set<ClassName>>();
    c.unsatisfiable = j.at("u").get<bool>();
    c.eqGroundRaw = j.at("eg").get<std::vector<ClassName>>();
    return c;
}

json constraintToJson(const Constraint& c) {
    return json{{"k", static_cast<int>(c.kind)},
                {"l", typeToJson(c.lhs)},
                {"r", typeToJson(c.rhs)},
                {"g", condToJson(c.guard)},
                {"loc", locToJson(c.loc)},
                {"n", c.note},
                {"ru", c.rule}};
}

Constraint constraintFromJson(const json& j) {
    int kind = j.at("k").get<int>();
    if (kind < 0 || kind > static_cast<int>(ConstraintKind::CondFail))
        throw std::runtime_error("bad constraint kind");
    Constraint c;
    c.kind = static_cast<ConstraintKind>(kind);
    c.lhs = typeFromJson(j.at("l"));
    c.rhs = typeFromJson(j.at("r"));
    c.guard = condFromJson(j.at("g"));
    c.loc = locFromJson(j.at("loc"));
    c.note = j.at("n").get<std::string>();
    c.rule = j.at("ru").get<std::string>();
    return c;
}

json solverToJson(const SolverState& s) {
    json bindings = json::array();
    for (const auto& [var, target] : s.subst.bindings())
        bindings.push_back(json::array({var, typeToJson(target)}));
    json deferred = json::array();
    for (const Constraint& c : s.deferred)
        deferred.push_back(constraintToJson(c));
    json out{{"b", std::move(bindings)},
             {"d", std::move(deferred)},
             {"n", s.normalizedConditions}};
    out["f"] = s.failure ? constraintToJson(*s.failure) : json();
    return out;
}

SolverState solverFromJson(const json& j) {
    SolverState s;
    for (const json& pair : j.at("b")) {
        TypeRef var = typeVar(pair.at(0).get<ClassVar>());
        TypeRef target = typeFromJson(pair.at(1));
        if (!s.subst.unify(var, target))
            throw std::runtime_error("inconsistent bindings");
    }
    for (const json& c : j.at("d"))
        s.deferred.push_back(constraintFromJson(c));
    if (!j.at("f").is_null())
        s.failure = constraintFromJson(j.at("f"));
    s.normalizedConditions = j.at("n").get<bool>();
    return s;
}

json reqToJson(const ClassReq& r) {
    json out{{"k", static_cast<int>(r.kind)},
             {"r", typeToJson(r.receiver)},
             {"m", r.member},
             {"p", json::array()}};
    for (const TypeRef& p : r.params)
        out["p"].push_back(typeToJson(p));
    out["res"] = r.result ? typeToJson(*r.result) : json();
    return out;
}

ClassReq reqFromJson(const json& j) {
    int kind = j.at("k").get<int>();
    if (kind < 0 || kind > static_cast<int>(ReqKind::OptMethod))
        throw std::runtime_error("bad requirement kind");
    ClassReq r;
    r.kind = static_cast<ReqKind>(kind);
    r.receiver = typeFromJson(j.at("r"));
    r.member = j.at("m").get<std::string>();
    for (const json& p : j.at("p"))
        r.params.push_back(typeFromJson(p));
    if (!j.at("res").is_null())
        r.result = typeFromJson(j.at("res"));
    return r;
}

json reqEntryToJson(const ReqEntry& e) {
    return json{{"q", reqToJson(e.req)},
                {"c", condToJson(e.cond)},
                {"loc", locToJson(e.loc)},
                {"n", e.note}};
}

ReqEntry reqEntryFromJson(const json& j) {
    ReqEntry e;
    e.req = reqFromJson(j.at("q"));
    e.cond = condFromJson(j.at("c"));
    e.loc = locFromJson(j.at("loc"));
    e.note = j.at("n").get<std::string>();
    return e;
}

json resultToJson(const CoClassResult& r) {
    json reqs = json::array();
    for (const ReqEntry& e : r.classReqs.entries())
        reqs.push_back(reqEntryToJson(e));
    json errors = json::array();
    for (const Diagnostic& d : r.errors)
        errors.push_back(json::array({d.loc.line, d.loc.column, d.rule, d.message}));
    return json{{"s", solverToJson(r.solver)}, {"cr", std::move(reqs)},
                {"e", std::move(errors)},      {"pk", r.peakLive},
                {"ff", r.freshFirst},          {"fe", r.freshEnd}};
}

CoClassResult resultFromJson(const json& j) {
    CoClassResult r;
    r.solver = solverFromJson(j.at("s"));
    for (const json& e : j.at("cr")) {
        ReqEntry entry = reqEntryFromJson(e);
        auto key = ClassReqs::keyFor(entry.req);
        r.classReqs.groups()[key].push_back(std::move(entry));
    }
    for (const json& e : j.at("e"))
        r.errors.push_back({{e.at(0).get<int>(), e.at(1).get<int>()},
                            e.at(2).get<std::string>(),
                            e.at(3).get<std::string>()});
    r.peakLive = j.at("pk").get<std::size_t>();
    r.freshFirst = j.at("ff").get<std::uint64_t>();
    r.freshEnd = j.at("fe").get<std::uint64_t>();
    return r;
}

} // namespace

bool saveMemo(const MemoTable& memo, const std::string& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out)
        return false;
    out << json{{"format", kCacheFormat},
                {"version", kCacheVersion},
                {"nextFresh", memo.nextFresh}}
        << '\n';
    for (const auto& [key, entry] : memo.entries) {
        out << json{{"key", key},
                    {"res", resultToJson(entry.result)},
                    {"facts", entry.facts.clauses}}
            << '\n';
    }
    return static_cast<bool>(out);
}

std::optional<MemoTable> loadMemo(const std::string& file) {
    std::ifstream in(file);
    if (!in)
        return std::nullopt;
    try {
        std::string line;
        if (!std::getline(in, line))
            return std::nullopt;
        json header = json::parse(line);
        if (header.at("format").get<std::string>() != kCacheFormat ||
            header.at("version").get<int>() != kCacheVersion)
            return std::nullopt;

        MemoTable memo;
        memo.nextFresh = header.at("nextFresh").get<std::uint64_t>();
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            json row = json::parse(line);
            MemoEntry entry;
            entry.result = resultFromJson(row.at("res"));
            entry.facts.clauses = row.at("facts").get<std::vector<std::string>>();
            memo.entries.emplace(row.at("key").get<std::string>(), std::move(entry));
        }
        return memo;
    } catch (...) {
        return std::nullopt;
    }
}

} // namespace cocofj
