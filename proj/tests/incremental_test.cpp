#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cocofj/class_table.hpp"
#include "cocofj/cocontextual.hpp"
#include "cocofj/constraints.hpp"
#include "cocofj/contextual.hpp"
#include "cocofj/incremental.hpp"
#include "cocofj/requirements.hpp"
#include "cocofj/syntax.hpp"
#include "test_fixtures.hpp"

using namespace cocofj;

namespace {

ProgramPtr programOf(const char* source) {
    ParseResult parsed = parseProgram(source);
    REQUIRE(parsed.ok());
    return parsed.program;
}

std::vector<ClassDeclPtr> declsOf(const char* source) {
    return leaves(programOf(source));
}

ClassDeclPtr declOf(const char* source) {
    std::vector<ClassDeclPtr> decls = declsOf(source);
    REQUIRE(decls.size() == 1);
    return decls[0];
}

CoOptions configOf(bool normalized, bool inDepth) {
    CoOptions opts;
    opts.reqs.normalizedConditions = normalized;
    opts.reqs.inDepth = inDepth;
    return opts;
}

const std::array<CoOptions, 3> kConfigs = {configOf(true, true), configOf(true, false),
                                           configOf(false, false)};

std::size_t nodeCount(const ProgramPtr& node) {
    if (node->isLeaf())
        return 1;
    std::size_t total = 1;
    for (const ProgramPtr& child : node->children)
        total += nodeCount(child);
    return total;
}

void collectNodes(const ProgramPtr& node, std::vector<ProgramPtr>& out) {
    out.push_back(node);
    if (!node->isLeaf())
        for (const ProgramPtr& child : node->children)
            collectNodes(child, out);
}

ProgramPtr nodeAt(ProgramPtr node, const std::vector<int>& path) {
    for (int index : path)
        node = node->children[static_cast<std::size_t>(index)];
    return node;
}

std::string describeErrors(const std::vector<Diagnostic>& errors) {
    std::string out;
    for (const Diagnostic& d : errors)
        out += "  [" + d.rule + "] " + d.message + "\n";
    return out;
}

// Two runs of the same subtree may draw different absolute variable ids, so
// snapshot comparisons rename variables by first appearance in a structural
// visit (requirement entries, then deferred constraints) before rendering.
struct Canon {
    std::map<ClassVar, ClassVar> ids;

    ClassVar id(ClassVar v) {
        auto [it, inserted] = ids.emplace(v, static_cast<ClassVar>(ids.size() + 1));
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

struct Summary {
    std::string lines;    // canon-rendered entries and deferred
    std::string resolves; // canon var -> canon-rendered resolve
    std::vector<Diagnostic> errors;
    std::size_t bindingCount = 0;
    std::uint64_t rangeSize = 0;
    std::size_t peakLive = 0;
};

Summary summarize(const CoClassResult& r) {
    Canon canon;
    Summary s;
    for (const ReqEntry& e : r.classReqs.entries())
        s.lines += renderClassReq(canon.req(e.req)) + " | " +
                   renderCondition(canon.cond(e.cond)) + " | " + e.note + "\n";
    for (const Constraint& c : r.solver.deferred)
        s.lines += renderConstraint(canon.constraint(c)) + "\n";

    std::vector<std::pair<ClassVar, ClassVar>> seen(canon.ids.begin(), canon.ids.end());
    std::sort(seen.begin(), seen.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [orig, mapped] : seen) {
        TypeRef resolved = r.solver.subst.resolve(typeVar(orig));
        s.resolves += renderType(typeVar(mapped)) + "=" +
                      renderType(canon.type(resolved)) + "\n";
    }

    s.errors = r.errors;
    s.bindingCount = r.solver.subst.bindings().size();
    s.rangeSize = r.freshEnd - r.freshFirst;
    s.peakLive = r.peakLive;
    return s;
}

// An eight-class program whose methods call across the tree, so single-class
// edits ripple into requirements on other subtrees.
const char* kGrid = R"(
class A extends Object {
  A() { super(); }
}
class B extends A {
  A a;
  B(A a) { super(); this.a = a; }
  A id(A x) { return x; }
}
class C extends B {
  B b;
  C(A a, B b) { super(a); this.b = b; }
  B peer() { return this.b; }
}
class D extends Object {
  D() { super(); }
  C mk(B b) { return new C(b, b); }
}
class E extends A {
  E() { super(); }
  A use(B b) { return b.id(b); }
}
class F extends Object {
  F() { super(); }
  B pick(C c) { return c; }
}
class G extends A {
  G() { super(); }
  B wrap(D d, B b) { return d.mk(b).peer(); }
}
class H extends Object {
  H() { super(); }
  A top(E e, B b) { return e.use(b); }
}
)";

ProgramPtr gridProgram() { return balance(declsOf(kGrid), 2); }

std::vector<ClassDeclPtr> replaceClass(std::vector<ClassDeclPtr> decls,
                                       const ClassName& name, ClassDeclPtr with) {
    for (ClassDeclPtr& d : decls)
        if (d->name == name) {
            d = std::move(with);
            return decls;
        }
    REQUIRE(false);
    return decls;
}

void checkMatchesCold(const IncrementalOutcome& warm, const ProgramPtr& program,
                      const CoOptions& opts) {
    IncrementalOutcome cold = initialCheck(program, opts);
    CHECK(warm.result.verdict.accepted == cold.result.verdict.accepted);
    CHECK(warm.result.verdict.errors == cold.result.verdict.errors);
    if (warm.result.verdict.errors != cold.result.verdict.errors) {
        MESSAGE("warm:\n" << describeErrors(warm.result.verdict.errors));
        MESSAGE("cold:\n" << describeErrors(cold.result.verdict.errors));
    }
}

} // namespace

TEST_CASE("a cold check matches the one-shot checker and caches every node") {
    ProgramPtr program = balance(declsOf(fixtures::kCore), 2);
    for (const CoOptions& opts : kConfigs) {
        IncrementalOutcome out = initialCheck(program, opts);
        CoProgramResult oneShot = coCheckProgram(program, opts);

        CHECK(out.result.verdict.accepted);
        CHECK(out.result.verdict.accepted == oneShot.verdict.accepted);
        CHECK(out.result.verdict.errors == oneShot.verdict.errors);

        CHECK(out.memo.entries.size() == nodeCount(program));
        CHECK(out.recomputedNodes == nodeCount(program));
        CHECK(out.reusedNodes == 0);

        std::vector<ProgramPtr> nodes;
        collectNodes(program, nodes);
        for (const ProgramPtr& node : nodes)
            CHECK(out.memo.entries.count(nodeKey(node)) == 1);

        CHECK(out.memo.nextFresh > 1);
        const CoClassResult& root = out.memo.entries.at(nodeKey(program)).result;
        CHECK(out.memo.nextFresh >= root.freshEnd);
    }
}

TEST_CASE("a rejected program still caches a snapshot for every subtree") {
    std::vector<ClassDeclPtr> decls = declsOf(fixtures::kCore);
    decls = replaceClass(decls, "List", declOf(R"(
        class List extends Object {
          List() { super(); }
          Nat size() { return this; }
          List add(Int a) { return this; }
        }
    )"));
    ProgramPtr program = balance(decls, 2);

    IncrementalOutcome out = initialCheck(program);
    CHECK(!out.result.verdict.accepted);
    CHECK(out.memo.entries.size() == nodeCount(program));

    CoProgramResult oneShot = coCheckProgram(program);
    CHECK(out.result.verdict.errors == oneShot.verdict.errors);
}

TEST_CASE("cold checks are deterministic snapshot for snapshot") {
    ProgramPtr program = gridProgram();
    IncrementalOutcome a = initialCheck(program);
    IncrementalOutcome b = initialCheck(program);
    CHECK(a.memo == b.memo);
    CHECK(a.result.verdict.errors == b.result.verdict.errors);
}

TEST_CASE("class facts restrict the class table to the subtree") {
    ProgramPtr program = gridProgram();

    ClassFacts whole = classFactsOf(program);
    ClassTableResult full = buildClassTable(program);
    REQUIRE(full.ok());
    std::string dump = dumpClauses(full.table);
    std::string joined;
    for (const std::string& line : whole.clauses)
        joined += line + "\n";
    CHECK(joined == dump);

    std::vector<ProgramPtr> nodes;
    collectNodes(program, nodes);
    for (const ProgramPtr& node : nodes) {
        std::vector<ProgramPtr> wrapped;
        for (const ClassDeclPtr& decl : leaves(node))
            wrapped.push_back(makeLeaf(decl));
        ClassTableResult restricted = buildClassTable(makeGroup(std::move(wrapped)));
        REQUIRE(restricted.ok());
        std::string expect = dumpClauses(restricted.table);
        std::string got;
        for (const std::string& line : classFactsOf(node).clauses)
            got += line + "\n";
        CHECK(got == expect);
    }
}

TEST_CASE("invalidation drops the addressed chain and keeps siblings") {
    ProgramPtr program = gridProgram(); // 8 leaves, arity 2: 15 nodes, depth 3
    REQUIRE(nodeCount(program) == 15);
    REQUIRE(treeDepth(program) == 3);

    IncrementalOutcome out = initialCheck(program);

    SUBCASE("a leaf removes exactly its root path") {
        MemoTable memo = out.memo;
        std::vector<int> path = {0, 0, 0};
        CHECK(invalidate(memo, program, path));
        CHECK(memo.entries.size() == 15 - 4);

        CHECK(memo.entries.count(nodeKey(program)) == 0);
        CHECK(memo.entries.count(nodeKey(nodeAt(program, {0}))) == 0);
        CHECK(memo.entries.count(nodeKey(nodeAt(program, {0, 0}))) == 0);
        CHECK(memo.entries.count(nodeKey(nodeAt(program, {0, 0, 0}))) == 0);

        // Siblings along the path keep their entries.
        CHECK(memo.entries.count(nodeKey(nodeAt(program, {0, 0, 1}))) == 1);
        CHECK(memo.entries.count(nodeKey(nodeAt(program, {0, 1}))) == 1);
        CHECK(memo.entries.count(nodeKey(nodeAt(program, {1}))) == 1);
    }

    SUBCASE("the root path alone removes one entry") {
        MemoTable memo = out.memo;
        CHECK(invalidate(memo, program, {}));
        CHECK(memo.entries.size() == 14);
        CHECK(memo.entries.count(nodeKey(program)) == 0);
    }

    SUBCASE("a bad path leaves the table untouched") {
        MemoTable memo = out.memo;
        CHECK(!invalidate(memo, program, {5}));
        CHECK(!invalidate(memo, program, {-1}));
        CHECK(!invalidate(memo, program, {0, 0, 0, 0}));
        CHECK(memo == out.memo);
    }
}

TEST_CASE("a forced no-op recheck recomputes only the invalidated chain") {
    ProgramPtr program = gridProgram();
    IncrementalOutcome first = initialCheck(program);
    REQUIRE(first.result.verdict.accepted);

    MemoTable memo = first.memo;
    std::vector<int> path = {1, 0, 1};
    REQUIRE(invalidate(memo, program, path));

    IncrementalOutcome again = recheck(std::move(memo), program);
    CHECK(again.result.verdict.accepted);
    CHECK(again.result.verdict.errors.empty());
    CHECK(again.recomputedNodes == path.size() + 1);
    CHECK(again.reusedNodes == 3); // one untouched sibling per level
    CHECK(again.memo.entries.size() == nodeCount(program));
}

TEST_CASE("editing one class recomputes one root path and matches cold") {
    std::vector<ClassDeclPtr> decls = declsOf(fixtures::kCore);
    ProgramPtr program = balance(decls, 2);
    IncrementalOutcome first = initialCheck(program);
    REQUIRE(first.result.verdict.accepted);

    SUBCASE("a return type change rejects exactly like a cold check") {
        std::vector<ClassDeclPtr> edited = replaceClass(decls, "List", declOf(R"(
            class List extends Object {
              List() { super(); }
              List size() { return 0; }
              List add(Int a) { return this; }
            }
        )"));
        ProgramPtr editedProgram = balance(edited, 2);

        IncrementalOutcome warm = recheck(first.memo, editedProgram);
        CHECK(!warm.result.verdict.accepted);
        checkMatchesCold(warm, editedProgram, {});

        auto path = pathToClass(editedProgram, "List");
        REQUIRE(path.has_value());
        CHECK(warm.recomputedNodes == path->size() + 1);
        CHECK(warm.recomputedNodes <=
              static_cast<std::size_t>(treeDepth(editedProgram)) + 1);
    }

    SUBCASE("renaming a method another class calls rejects like a cold check") {
        std::vector<ClassDeclPtr> grid = declsOf(kGrid);
        ProgramPtr base = balance(grid, 2);
        IncrementalOutcome cached = initialCheck(base);
        REQUIRE(cached.result.verdict.accepted);

        std::vector<ClassDeclPtr> edited = replaceClass(grid, "B", declOf(R"(
            class B extends A {
              A a;
              B(A a) { super(); this.a = a; }
              A ident(A x) { return x; }
            }
        )"));
        ProgramPtr editedProgram = balance(edited, 2);

        IncrementalOutcome warm = recheck(cached.memo, editedProgram);
        CHECK(!warm.result.verdict.accepted);
        checkMatchesCold(warm, editedProgram, {});

        bool mentionsId = false;
        for (const Diagnostic& d : warm.result.verdict.errors)
            if (d.message.find("id") != std::string::npos)
                mentionsId = true;
        CHECK(mentionsId);

        auto path = pathToClass(editedProgram, "B");
        REQUIRE(path.has_value());
        CHECK(warm.recomputedNodes == path->size() + 1);
    }
}

TEST_CASE("cached snapshots equal what a cold run of the subtree produces") {
    std::vector<ClassDeclPtr> grid = declsOf(kGrid);
    ProgramPtr program = balance(grid, 2);
    for (const CoOptions& opts : kConfigs) {
        IncrementalOutcome first = initialCheck(program, opts);

        std::vector<ClassDeclPtr> edited = replaceClass(grid, "E", declOf(R"(
            class E extends A {
              E() { super(); }
              A use(B b) { return b.id(b.a); }
            }
        )"));
        ProgramPtr editedProgram = balance(edited, 2);
        IncrementalOutcome warm = recheck(first.memo, editedProgram, opts);
        checkMatchesCold(warm, editedProgram, opts);

        std::vector<ProgramPtr> nodes;
        collectNodes(editedProgram, nodes);
        for (const ProgramPtr& node : nodes) {
            auto it = warm.memo.entries.find(nodeKey(node));
            REQUIRE(it != warm.memo.entries.end());

            FreshSource coldFresh(1);
            CoClassResult cold = coCheckNode(node, coldFresh, opts);
            Summary cached = summarize(it->second.result);
            Summary fresh = summarize(cold);
            CHECK(cached.lines == fresh.lines);
            CHECK(cached.resolves == fresh.resolves);
            CHECK(cached.errors == fresh.errors);
            CHECK(cached.bindingCount == fresh.bindingCount);
            CHECK(cached.peakLive == fresh.peakLive);
            // Group snapshots built on reused children span the id gap up to
            // the recomputed range, so sizes only align on leaves.
            if (node->isLeaf())
                CHECK(cached.rangeSize == fresh.rangeSize);
            CHECK(it->second.facts == classFactsOf(node));
        }
    }
}

TEST_CASE("fresh ranges of leaf snapshots never overlap across passes") {
    std::vector<ClassDeclPtr> grid = declsOf(kGrid);
    ProgramPtr program = balance(grid, 2);
    IncrementalOutcome first = initialCheck(program);
    std::uint64_t firstHigh = first.memo.nextFresh;

    std::vector<ClassDeclPtr> edited = replaceClass(grid, "D", declOf(R"(
        class D extends Object {
          D() { super(); }
          C mk(B b) { return new C(b.a, b); }
        }
    )"));
    ProgramPtr editedProgram = balance(edited, 2);
    IncrementalOutcome warm = recheck(first.memo, editedProgram);
    CHECK(warm.memo.nextFresh >= firstHigh);

    // Every leaf snapshot in the new program: collect ranges, check pairwise
    // disjointness, and check the recomputed leaf sits above the first pass.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    std::vector<ProgramPtr> nodes;
    collectNodes(editedProgram, nodes);
    for (const ProgramPtr& node : nodes) {
        if (!node->isLeaf())
            continue;
        const CoClassResult& r = warm.memo.entries.at(nodeKey(node)).result;
        if (r.freshEnd > r.freshFirst)
            ranges.emplace_back(r.freshFirst, r.freshEnd);
        if (node->decl->name == "D")
            CHECK(r.freshFirst >= firstHigh);
    }
    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 1; i < ranges.size(); ++i)
        CHECK(ranges[i - 1].second <= ranges[i].first);
}

TEST_CASE("the session cache file round-trips and rejects other versions") {
    ProgramPtr program = gridProgram();
    IncrementalOutcome out = initialCheck(program);

    std::string file = "incremental_memo_cache.tmp";
    REQUIRE(saveMemo(out.memo, file));

    SUBCASE("a loaded table equals the saved one and rechecks from it") {
        std::optional<MemoTable> loaded = loadMemo(file);
        REQUIRE(loaded.has_value());
        CHECK(*loaded == out.memo);

        std::vector<ClassDeclPtr> edited = replaceClass(declsOf(kGrid), "F", declOf(R"(
            class F extends Object {
              F() { super(); }
              C pick(C c) { return c; }
            }
        )"));
        ProgramPtr editedProgram = balance(edited, 2);
        IncrementalOutcome warm = recheck(std::move(*loaded), editedProgram);
        checkMatchesCold(warm, editedProgram, {});
        auto path = pathToClass(editedProgram, "F");
        REQUIRE(path.has_value());
        CHECK(warm.recomputedNodes == path->size() + 1);
    }

    SUBCASE("a missing file loads as nothing") {
        CHECK(!loadMemo("does_not_exist.tmp").has_value());
    }

    SUBCASE("garbage content loads as nothing") {
        std::FILE* f = std::fopen(file.c_str(), "w");
        REQUIRE(f);
        std::fputs("not a cache\n", f);
        std::fclose(f);
        CHECK(!loadMemo(file).has_value());
    }

    SUBCASE("a different version loads as nothing") {
        std::FILE* f = std::fopen(file.c_str(), "w");
        REQUIRE(f);
        std::fputs("{\"format\":\"cocofj-memo\",\"version\":999,\"nextFresh\":1}\n", f);
        std::fclose(f);
        CHECK(!loadMemo(file).has_value());
    }

    std::remove(file.c_str());
}

// ---------------------------------------------------------------------------
// Randomized edit sequences: after every edit, a warm recheck must agree with
// a cold check verdict for verdict and diagnostic for diagnostic, and an
// in-place single-class edit must stay within the root-path work bound.

namespace {

struct EditGen {
    std::mt19937 rng;
    int serial = 0;

    explicit EditGen(unsigned seed) : rng(seed) {}

    int pick(int bound) {
        return static_cast<int>(rng() % static_cast<unsigned>(bound));
    }

    template <typename T>
    const T& from(const std::vector<T>& pool) {
        return pool[static_cast<std::size_t>(pick(static_cast<int>(pool.size())))];
    }
};

const std::vector<std::string> kTypePool = {"A", "B", "C", "D", "Object", "Ghost"};

// Applies one random edit; returns false when the edit kind does not apply
// (e.g. deleting a method from a class that has none).
bool applyEdit(EditGen& gen, std::vector<ClassDeclPtr>& decls, bool& inPlace) {
    int kind = gen.pick(8);
    inPlace = kind <= 4;
    std::size_t at = static_cast<std::size_t>(gen.pick(static_cast<int>(decls.size())));
    const ClassDecl& old = *decls[at];

    switch (kind) {
    case 0: { // retype a method's return
        if (old.methods.empty())
            return false;
        auto copy = std::make_shared<ClassDecl>(old);
        MethodDecl& m = copy->methods[static_cast<std::size_t>(
            gen.pick(static_cast<int>(copy->methods.size())))];
        m.returnType = gen.from(kTypePool);
        decls[at] = std::move(copy);
        return true;
    }
    case 1: { // rename a method
        if (old.methods.empty())
            return false;
        auto copy = std::make_shared<ClassDecl>(old);
        MethodDecl& m = copy->methods[static_cast<std::size_t>(
            gen.pick(static_cast<int>(copy->methods.size())))];
        m.name += "X";
        decls[at] = std::move(copy);
        return true;
    }
    case 2: { // drop a method
        if (old.methods.empty())
            return false;
        auto copy = std::make_shared<ClassDecl>(old);
        copy->methods.erase(copy->methods.begin() + gen.pick(static_cast<int>(
                                                        copy->methods.size())));
        decls[at] = std::move(copy);
        return true;
    }
    case 3: { // replace a method body with a constructor call
        if (old.methods.empty())
            return false;
        auto copy = std::make_shared<ClassDecl>(old);
        MethodDecl& m = copy->methods[static_cast<std::size_t>(
            gen.pick(static_cast<int>(copy->methods.size())))];
        m.body = makeNew(gen.from(kTypePool), {});
        decls[at] = std::move(copy);
        return true;
    }
    case 4: { // repoint the superclass
        auto copy = std::make_shared<ClassDecl>(old);
        copy->superName = gen.from(kTypePool);
        if (copy->superName == copy->name)
            copy->superName = "Object";
        decls[at] = std::move(copy);
        return true;
    }
    case 5: { // delete the class
        if (decls.size() <= 2)
            return false;
        decls.erase(decls.begin() + static_cast<std::ptrdiff_t>(at));
        return true;
    }
    case 6: { // insert a fresh small class
        auto fresh = std::make_shared<ClassDecl>();
        fresh->name = "N" + std::to_string(++gen.serial);
        fresh->superName = gen.from(kTypePool);
        if (fresh->superName == "Ghost")
            fresh->superName = "Object";
        decls.push_back(std::move(fresh));
        return true;
    }
    default: { // shuffle declaration order
        std::shuffle(decls.begin(), decls.end(), gen.rng);
        return true;
    }
    }
}

} // namespace

TEST_CASE("random edit sequences recheck exactly like cold checks") {
    int accepted = 0;
    int rejected = 0;
    for (unsigned seed = 1; seed <= 40; ++seed) {
        for (const CoOptions& opts : kConfigs) {
            EditGen gen(seed);
            std::vector<ClassDeclPtr> decls = declsOf(kGrid);
            ProgramPtr program = balance(decls, 2);
            IncrementalOutcome state = initialCheck(program, opts);

            for (int round = 0; round < 3; ++round) {
                std::vector<ClassDeclPtr> next = decls;
                bool inPlace = false;
                if (!applyEdit(gen, next, inPlace))
                    continue;
                std::size_t before = decls.size();
                decls = std::move(next);
                ProgramPtr editedProgram = balance(decls, 2);

                IncrementalOutcome warm =
                    recheck(std::move(state.memo), editedProgram, opts);
                IncrementalOutcome cold = initialCheck(editedProgram, opts);

                CHECK(warm.result.verdict.accepted == cold.result.verdict.accepted);
                CHECK(warm.result.verdict.errors == cold.result.verdict.errors);
                if (warm.result.verdict.errors != cold.result.verdict.errors) {
                    MESSAGE("seed " << seed << " round " << round);
                    MESSAGE("warm:\n" << describeErrors(warm.result.verdict.errors));
                    MESSAGE("cold:\n" << describeErrors(cold.result.verdict.errors));
                }

                if (inPlace && decls.size() == before)
                    CHECK(warm.recomputedNodes <=
                          static_cast<std::size_t>(treeDepth(editedProgram)) + 1);

                (cold.result.verdict.accepted ? accepted : rejected) += 1;
                state = std::move(warm);
            }
        }
    }
    CHECK(accepted >= 30);
    CHECK(rejected >= 30);
}
