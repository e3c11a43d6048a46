#pragma once

// Memoized rechecking on top of the constraint-based checker.
//
// Every program node — each class declaration and each grouping node above
// them — caches the full checking snapshot for its subtree, keyed by the
// subtree's structural identity (nodeKey). Because snapshots from disjoint
// variable ranges merge without renaming, a cached subtree is reusable
// verbatim: a recheck recomputes only the nodes whose keys are missing from
// the cache and re-merges parents from immutable child snapshots. The final
// program verdict (well-formedness gate, requirement discharge, solver
// finalization) always reruns at the root; it is cheap relative to the walk
// and keeps the verdict authoritative.
//
// Editing a subtree changes its key and the keys of all its ancestors, so
// stale entries miss naturally. Explicit invalidation exists for edits that
// keep the structure byte-identical (a forced no-op recheck) and for cache
// management; it drops the addressed node and its ancestor chain while
// sibling subtrees keep their entries.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cocofj/cocontextual.hpp"
#include "cocofj/syntax.hpp"

namespace cocofj {

// ---------------------------------------------------------------------------
// Class facts
//
// The ground signature clauses contributed by the declarations inside one
// subtree: exactly the class table restricted to that subtree, in its
// deterministic dump form. Cached alongside each snapshot so a session can
// inspect what a subtree exports without replaying it.

struct ClassFacts {
    std::vector<std::string> clauses;

    bool operator==(const ClassFacts& other) const = default;
};

ClassFacts classFactsOf(const ProgramPtr& node);

// ---------------------------------------------------------------------------
// Memo table

struct MemoEntry {
    CoClassResult result; // immutable snapshot; parents re-merge, never mutate
    ClassFacts facts;

    bool operator==(const MemoEntry& other) const = default;
};

struct MemoTable {
    std::map<std::string, MemoEntry> entries; // nodeKey → snapshot

    // First variable id above every cached range. Recomputations allocate
    // from here so cached subtrees keep their original variables and new
    // snapshots stay disjoint from them.
    std::uint64_t nextFresh = 1;

    bool operator==(const MemoTable& other) const = default;
};

// ---------------------------------------------------------------------------
// Operations

struct IncrementalOutcome {
    CoProgramResult result;
    MemoTable memo;
    std::size_t recomputedNodes = 0; // nodes checked during this pass
    std::size_t reusedNodes = 0;     // nodes served from the cache
};

// Cold check: populates an entry for every node of the program. The verdict
// is identical to coCheckProgram on the same program.
IncrementalOutcome initialCheck(const ProgramPtr& program, const CoOptions& opts = {});

// Recheck after an edit: reuses every cached subtree whose structure is
// unchanged, recomputes the rest, and reruns the root verdict. The verdict
// and error list are identical to a cold check of `program`.
IncrementalOutcome recheck(MemoTable memo, const ProgramPtr& program,
                           const CoOptions& opts = {});

// Drops the entries for the node addressed by `path` (child indices from the
// root; empty addresses the root) and for every ancestor on the way down.
// Sibling subtrees keep their entries. Returns false — leaving the table
// untouched — when the path does not address a node.
bool invalidate(MemoTable& memo, const ProgramPtr& program,
                const std::vector<int>& path);

// Child-index path of the leaf declaring `cls`, if the program has one.
std::optional<std::vector<int>> pathToClass(const ProgramPtr& program,
                                            const ClassName& cls);

// ---------------------------------------------------------------------------
// Session cache file
//
// Line-based text: a header line with the format name, version, and the
// fresh-variable high-water mark, then one line per entry. Loading a file
// with a different version (or any malformed content) yields nullopt — the
// caller falls back to a cold check and rewrites the file.

bool saveMemo(const MemoTable& memo, const std::string& file);
std::optional<MemoTable> loadMemo(const std::string& file);

} // namespace cocofj
