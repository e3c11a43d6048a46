#pragma once

// Wall-clock benchmarking of the three checking pipelines and the
// differential harness that cross-checks their verdicts.
//
// Timing discipline: each phase is warmed up until its spread stabilizes
// (or a warm-up cap is hit), then measured for a fixed number of
// repetitions; the report carries medians with quartile spread. The
// incremental phase re-derives its input each repetition — copy the warm
// memo, invalidate the three Nat classes, and time only the recheck — since
// invalidating the arithmetic everything depends on is the hard case for
// incrementality.

#include <cstddef>
#include <string>
#include <vector>

#include "cocofj/incremental.hpp"
#include "cocofj/synth.hpp"
#include "cocofj/syntax.hpp"

namespace cocofj {

// ---------------------------------------------------------------------------
// Benchmark

struct PhaseStats {
    double medianMs = 0.0;
    double lowerMs = 0.0; // first quartile
    double upperMs = 0.0; // third quartile
    std::vector<double> samplesMs;
};

struct BenchRow {
    SynthConfig config;
    std::size_t classes = 0;
    std::size_t nodes = 0;
    PhaseStats contextual; // reference checker, from scratch
    PhaseStats coInit;     // constraint checker, cold
    PhaseStats coInc;      // recheck after invalidating the Nat trio
    double initSpeedup = 0.0; // contextual median / coInit median
    double incSpeedup = 0.0;  // contextual median / coInc median
    int breakEven = -1;       // smallest n with init + n·inc < n·contextual
    std::size_t recomputedNodes = 0; // during one incremental recheck
    std::size_t reusedNodes = 0;
};

struct BenchReport {
    int repetitions = 0;
    std::vector<BenchRow> rows;
};

// Zero or negative repetitions yield an empty report. Runs are strictly
// sequential; one measurement at a time.
BenchReport runBenchmark(const std::vector<SynthConfig>& configs, int repetitions);

// Human-readable table.
std::string renderBenchTable(const BenchReport& report);

// Machine-readable line-delimited records: one JSON object per measured
// sample, carrying config, phase, nanoseconds, and nodes recomputed.
std::string renderBenchRecords(const BenchReport& report);

// ---------------------------------------------------------------------------
// Differential checking

struct DiffEntry {
    std::string name;
    ProgramPtr program;
};

struct Disagreement {
    std::string name;
    bool contextualAccepted = false;
    bool coContextualAccepted = false;
    std::string minimized; // smallest still-disagreeing program, rendered
};

struct DiffReport {
    std::size_t total = 0;
    std::size_t agreements = 0;
    std::vector<Disagreement> disagreements;

    bool allAgree() const { return disagreements.empty(); }
};

// Runs both checkers on every entry. Any disagreement is shrunk greedily —
// drop classes, then methods, while the verdicts still differ — and reported
// with the minimized reproducer.
DiffReport diffCheck(const std::vector<DiffEntry>& corpus);

std::string renderDiffReport(const DiffReport& report);

} // namespace cocofj
