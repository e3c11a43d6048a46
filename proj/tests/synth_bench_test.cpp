#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cocofj/bench.hpp"
#include "cocofj/class_table.hpp"
#include "cocofj/cocontextual.hpp"
#include "cocofj/contextual.hpp"
#include "cocofj/incremental.hpp"
#include "cocofj/synth.hpp"
#include "cocofj/syntax.hpp"
#include "test_fixtures.hpp"

using namespace cocofj;

namespace {

const std::vector<Scheme> kSchemes = {Scheme::AccumSuper, Scheme::AccumPrev,
                                      Scheme::AccumPrevSuper};
const std::vector<Naming> kNamings = {Naming::Unique, Naming::Mirrored,
                                      Naming::Override, Naming::MirOver};

ProgramPtr programOf(const char* source) {
    ParseResult parsed = parseProgram(source);
    REQUIRE(parsed.ok());
    return parsed.program;
}

std::string describe(const SynthConfig& c) {
    return std::string(schemeName(c.scheme)) + "/" + namingName(c.naming) + " k=" +
           std::to_string(c.rootClasses) + " h=" + std::to_string(c.height);
}

} // namespace

TEST_CASE("the class count formula holds across the whole small grid") {
    for (Scheme scheme : kSchemes)
        for (Naming naming : kNamings)
            for (int k = 1; k <= 6; ++k)
                for (int h = 1; h <= 6; ++h) {
                    SynthConfig config{scheme, naming, k, h};
                    CHECK(classCount(config) == k * ((1 << h) - 1) + 3);
                    if (h <= 4) {
                        ProgramPtr program = synthesize(config);
                        CHECK(leaves(program).size() ==
                              static_cast<std::size_t>(classCount(config)));
                    }
                }

    CHECK(classCount({Scheme::AccumSuper, Naming::Unique, 40, 5}) == 1243);
    CHECK(classCount({Scheme::AccumPrev, Naming::MirOver, 1, 1}) == 4);
}

TEST_CASE("every scheme and naming combination is accepted by both checkers") {
    for (Scheme scheme : kSchemes)
        for (Naming naming : kNamings)
            for (int k : {1, 2, 3})
                for (int h : {1, 2, 3}) {
                    SynthConfig config{scheme, naming, k, h};
                    ProgramPtr program = synthesize(config);

                    Verdict reference = checkProgram(program);
                    if (!reference.accepted) {
                        MESSAGE(describe(config));
                        for (const Diagnostic& d : reference.errors)
                            MESSAGE(d.format("synth"));
                    }
                    CHECK(reference.accepted);

                    CoProgramResult co = coCheckProgram(program);
                    CHECK(co.verdict.accepted);
                }
}

TEST_CASE("synthesis is deterministic and names follow the schemes") {
    SynthConfig config{Scheme::AccumPrevSuper, Naming::MirOver, 3, 3};
    ProgramPtr a = synthesize(config);
    ProgramPtr b = synthesize(config);
    CHECK(nodeKey(a) == nodeKey(b));

    // MirOver: one method name family-wide; Mirrored fields by position.
    std::set<std::string> methodNames;
    std::set<std::string> natFieldNames;
    for (const ClassDeclPtr& decl : leaves(a)) {
        if (decl->name == "Nat" || decl->name == "Zero" || decl->name == "Succ")
            continue;
        for (const MethodDecl& m : decl->methods)
            methodNames.insert(m.name);
        natFieldNames.insert(decl->fields.at(0).name);
    }
    CHECK(methodNames == std::set<std::string>{"m"});
    CHECK(natFieldNames == std::set<std::string>{"f1", "f2", "f3", "f4", "f5",
                                                 "f6", "f7"});

    // Unique: every hierarchy method name distinct (the numeric trio keeps
    // its deliberate plus overrides either way).
    ProgramPtr u = synthesize({Scheme::AccumSuper, Naming::Unique, 2, 3});
    std::set<std::string> unique;
    std::size_t total = 0;
    for (const ClassDeclPtr& decl : leaves(u)) {
        if (decl->name == "Nat" || decl->name == "Zero" || decl->name == "Succ")
            continue;
        for (const MethodDecl& m : decl->methods) {
            unique.insert(m.name);
            total += 1;
        }
    }
    CHECK(unique.size() == total);
}

TEST_CASE("the prev scheme wires a field into the previous hierarchy") {
    ProgramPtr program = synthesize({Scheme::AccumPrev, Naming::Unique, 3, 2});
    std::map<std::string, ClassDeclPtr> byName;
    for (const ClassDeclPtr& decl : leaves(program))
        byName[decl->name] = decl;

    // Hierarchy 1 has no extra field; hierarchies 2 and 3 point backwards.
    CHECK(byName.at("C1_2")->fields.size() == 1);
    REQUIRE(byName.at("C2_2")->fields.size() == 2);
    CHECK(byName.at("C2_2")->fields[1].type == "C1_2");
    REQUIRE(byName.at("C3_3")->fields.size() == 2);
    CHECK(byName.at("C3_3")->fields[1].type == "C2_3");

    // The constructor threads inherited fields before its own.
    const ClassDecl& leaf = *byName.at("C3_2");
    CHECK(leaf.superName == "C3_1");
    CHECK(leaf.ctor.superParams.size() == byName.at("C3_1")->fields.size());
    CHECK(leaf.ctor.ownParams == leaf.fields);
}

TEST_CASE("mutation is deterministic and the reference checker arbitrates") {
    ProgramPtr base = synthesize({Scheme::AccumSuper, Naming::Mirrored, 2, 3});
    REQUIRE(checkProgram(base).accepted);

    int accepts = 0;
    int rejects = 0;
    std::set<std::string> flavors;
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        Mutation first = mutate(base, seed);
        Mutation second = mutate(base, seed);
        CHECK(nodeKey(first.program) == nodeKey(second.program));
        CHECK(first.description == second.description);
        CHECK(first.expectAccept == second.expectAccept);

        CHECK(first.expectAccept == checkProgram(first.program).accepted);
        (first.expectAccept ? accepts : rejects) += 1;
        flavors.insert(first.description.substr(0, first.description.find(' ')));
    }
    CHECK(accepts >= 10); // identity rolls and benign faults both land here
    CHECK(rejects >= 60);
    // All seven shapes appear: identity plus the six fault kinds (the trio's
    // plus overrides guarantee a target for the override fault).
    CHECK(flavors == std::set<std::string>{"identity", "retype", "delete",
                                           "constructor", "override", "unbound",
                                           "upcast"});
}

TEST_CASE("both checkers agree on mutants of a hand-written program") {
    ProgramPtr base = balance(leaves(programOf(fixtures::kCore)), 2);
    REQUIRE(checkProgram(base).accepted);

    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Mutation m = mutate(base, seed);
        CHECK(m.expectAccept == checkProgram(m.program).accepted);
        CHECK(m.expectAccept == coCheckProgram(m.program).verdict.accepted);
    }
}

TEST_CASE("a benchmark run reports sane phases and an empty run stays empty") {
    CHECK(runBenchmark({{Scheme::AccumSuper, Naming::Unique, 2, 2}}, 0).rows.empty());

    SynthConfig config{Scheme::AccumSuper, Naming::Override, 2, 3};
    BenchReport report = runBenchmark({config}, 3);
    REQUIRE(report.rows.size() == 1);
    const BenchRow& row = report.rows[0];

    CHECK(row.classes == static_cast<std::size_t>(classCount(config)));
    CHECK(row.contextual.samplesMs.size() == 3);
    CHECK(row.coInit.samplesMs.size() == 3);
    CHECK(row.coInc.samplesMs.size() == 3);
    CHECK(row.contextual.medianMs > 0.0);
    CHECK(row.coInit.medianMs > 0.0);
    CHECK(row.coInc.medianMs > 0.0);
    CHECK(row.contextual.lowerMs <= row.contextual.medianMs);
    CHECK(row.contextual.medianMs <= row.contextual.upperMs);

    // Invalidating the Nat trio recomputes its three leaves, their group,
    // and the root — a sliver of the whole tree.
    CHECK(row.recomputedNodes == 5);
    CHECK(row.recomputedNodes * 4 < row.nodes);
    CHECK(row.nodes > 0);

    std::string table = renderBenchTable(report);
    CHECK(table.find("override") != std::string::npos);
    CHECK(table.find("break-even") != std::string::npos);

    std::string records = renderBenchRecords(report);
    CHECK(std::count(records.begin(), records.end(), '\n') == 9);
    CHECK(records.find("\"phase\":\"co-inc\"") != std::string::npos);
    CHECK(records.find("\"ns\":") != std::string::npos);
}

TEST_CASE("the differential harness agrees on synthesized and mutated corpora") {
    CHECK(diffCheck({}).allAgree());
    CHECK(diffCheck({}).total == 0);

    std::vector<DiffEntry> corpus;
    for (Scheme scheme : kSchemes)
        for (Naming naming : kNamings) {
            SynthConfig config{scheme, naming, 2, 2};
            corpus.push_back({describe(config), synthesize(config)});
        }
    ProgramPtr base = synthesize({Scheme::AccumPrev, Naming::Override, 2, 2});
    for (std::uint64_t seed = 1; seed <= 25; ++seed)
        corpus.push_back({"mutant-" + std::to_string(seed),
                          mutate(base, seed).program});

    DiffReport report = diffCheck(corpus);
    CHECK(report.total == corpus.size());
    CHECK(report.agreements == corpus.size());
    CHECK(report.allAgree());
    std::string text = renderDiffReport(report);
    CHECK(text.find("100%") != std::string::npos);
    CHECK(text.find("<100%") == std::string::npos);
}

TEST_CASE("a disagreement renders its reproducer and sinks the report") {
    DiffReport report;
    report.total = 2;
    report.agreements = 1;
    report.disagreements.push_back(
        {"broken-entry", true, false,
         render(balance(leaves(programOf(fixtures::kCore)), 2))});
    CHECK(!report.allAgree());

    std::string text = renderDiffReport(report);
    CHECK(text.find("DISAGREEMENT") != std::string::npos);
    CHECK(text.find("broken-entry") != std::string::npos);
    CHECK(text.find("class Nat") != std::string::npos);
    CHECK(text.find("<100%") != std::string::npos);
}

TEST_CASE("scheme and naming names round-trip for the command line") {
    for (Scheme scheme : kSchemes)
        CHECK(schemeFromName(schemeName(scheme)) == scheme);
    for (Naming naming : kNamings)
        CHECK(namingFromName(namingName(naming)) == naming);
    CHECK(!schemeFromName("bogus").has_value());
    CHECK(!namingFromName("").has_value());
}
