#pragma once

// Program synthesis for benchmarking and differential testing.
//
// A synthesized program is a family of k root hierarchies — each a binary
// inheritance tree of a given height whose classes carry one Nat field and
// one nullary Nat-returning method — plus the Nat/Zero/Succ arithmetic trio
// the method bodies lean on. The body scheme decides which neighbours each
// method pulls numbers from (the superclass chain, the previous hierarchy,
// or both), and the naming scheme decides how aggressively member names
// collide across the family. Every combination is well-typed by
// construction.
//
// The mutator turns an accepted program into a negative test case by
// applying one seeded random fault; the reference checker is the arbiter
// for the expected verdict, since some faults (say, widening a return type)
// can land on a still-valid program.

#include <cstdint>
#include <optional>
#include <string>

#include "cocofj/syntax.hpp"

namespace cocofj {

// Body scheme: where each class's method accumulates its numbers from.
enum class Scheme {
    AccumSuper,     // own field + the superclass's method
    AccumPrev,      // own field + the mirror class in the previous hierarchy
    AccumPrevSuper, // all three
};

// Naming scheme: how member names are shared across the family. Method names
// follow the scheme literally; field names stay unique along each inheritance
// chain (a shadowed field would be ill-formed), so the sharing axis for
// fields is across hierarchies only.
enum class Naming {
    Unique,   // every member name is unique
    Mirrored, // hierarchies reuse names position for position
    Override, // each hierarchy shares one method name along every chain
    MirOver,  // both: one method name across the whole family
};

const char* schemeName(Scheme scheme);
const char* namingName(Naming naming);
std::optional<Scheme> schemeFromName(const std::string& name);
std::optional<Naming> namingFromName(const std::string& name);

struct SynthConfig {
    Scheme scheme = Scheme::AccumSuper;
    Naming naming = Naming::Unique;
    int rootClasses = 1; // k ≥ 1
    int height = 1;      // h ≥ 1
};

// k·(2^h − 1) + 3: the hierarchies plus the Nat trio.
int classCount(const SynthConfig& config);

// Deterministic: equal configs produce identical programs. The tree groups
// the Nat trio as the first child of the root, with one balanced subtree per
// hierarchy beside it.
ProgramPtr synthesize(const SynthConfig& config);

// One seeded random fault (or the identity). `expectAccept` is the reference
// checker's verdict on the result, recorded so differential harnesses can
// assert agreement without re-deciding what the fault should have done.
struct Mutation {
    ProgramPtr program;
    bool expectAccept = false;
    std::string description;
};

Mutation mutate(const ProgramPtr& program, std::uint64_t seed);

} // namespace cocofj
