#include "cocofj/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cocofj/cocontextual.hpp"
#include "cocofj/contextual.hpp"

namespace cocofj {

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

PhaseStats statsOf(std::vector<double> samples) {
    PhaseStats out;
    out.samplesMs = samples;
    if (samples.empty())
        return out;
    std::sort(samples.begin(), samples.end());
    auto at = [&](double q) {
        return samples[std::min(samples.size() - 1,
                                static_cast<std::size_t>(q * static_cast<double>(
                                                             samples.size())))];
    };
    out.medianMs = at(0.5);
    out.lowerMs = at(0.25);
    out.upperMs = at(0.75);
    return out;
}

// Runs `phase` until the last three timings agree within 25% of their
// median (or the cap is hit), then measures `reps` samples.
template <typename Phase>
PhaseStats measure(Phase&& phase, int reps) {
    std::vector<double> recent;
    for (int i = 0; i < 8; ++i) {
        Clock::time_point start = Clock::now();
        phase();
        recent.push_back(msSince(start));
        if (recent.size() >= 3) {
            std::vector<double> last(recent.end() - 3, recent.end());
            std::sort(last.begin(), last.end());
            if (last[2] - last[0] <= 0.25 * std::max(last[1], 1e-3))
                break;
        }
    }
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        Clock::time_point start = Clock::now();
        phase();
        samples.push_back(msSince(start));
    }
    return statsOf(std::move(samples));
}

int breakEvenOf(double initMs, double incMs, double baselineMs) {
    if (baselineMs <= incMs)
        return -1;
    return static_cast<int>(std::floor(initMs / (baselineMs - incMs))) + 1;
}

std::vector<std::vector<int>> natPaths(const ProgramPtr& program) {
    std::vector<std::vector<int>> paths;
    for (const char* cls : {"Nat", "Zero", "Succ"})
        if (auto path = pathToClass(program, cls))
            paths.push_back(*path);
    return paths;
}

} // namespace

BenchReport runBenchmark(const std::vector<SynthConfig>& configs, int repetitions) {
    BenchReport report;
    report.repetitions = repetitions;
    if (repetitions <= 0)
        return report;

    for (const SynthConfig& config : configs) {
        BenchRow row;
        row.config = config;
        ProgramPtr program = synthesize(config);
        row.classes = leaves(program).size();

        row.contextual = measure([&] { checkProgram(program); }, repetitions);
        row.coInit = measure([&] { initialCheck(program); }, repetitions);

        IncrementalOutcome warm = initialCheck(program);
        row.nodes = warm.memo.entries.size();
        std::vector<std::vector<int>> paths = natPaths(program);

        std::vector<double> incSamples;
        incSamples.reserve(static_cast<std::size_t>(repetitions));
        auto oneRecheck = [&](bool record) {
            MemoTable memo = warm.memo;
            for (const std::vector<int>& path : paths)
                invalidate(memo, program, path);
            Clock::time_point start = Clock::now();
            IncrementalOutcome again = recheck(std::move(memo), program);
            double ms = msSince(start);
            if (record)
                incSamples.push_back(ms);
            row.recomputedNodes = again.recomputedNodes;
            row.reusedNodes = again.reusedNodes;
        };
        for (int i = 0; i < 3; ++i)
            oneRecheck(false);
        for (int i = 0; i < repetitions; ++i)
            oneRecheck(true);
        row.coInc = statsOf(std::move(incSamples));

        row.initSpeedup =
            row.coInit.medianMs > 0 ? row.contextual.medianMs / row.coInit.medianMs : 0;
        row.incSpeedup =
            row.coInc.medianMs > 0 ? row.contextual.medianMs / row.coInc.medianMs : 0;
        row.breakEven = breakEvenOf(row.coInit.medianMs, row.coInc.medianMs,
                                    row.contextual.medianMs);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string renderBenchTable(const BenchReport& report) {
    std::ostringstream out;
    out << "scheme     naming    k  h  classes  contextual-ms  co-init-ms"
           "     co-inc-ms      init-x  inc-x  break-even  recomputed\n";
    char line[256];
    for (const BenchRow& row : report.rows) {
        std::snprintf(line, sizeof line,
                      "%-10s %-9s %-2d %-2d %-8zu %8.3f       %8.3f (%4.2fx) "
                      "%8.3f (%4.2fx) %-7s %zu/%zu\n",
                      schemeName(row.config.scheme), namingName(row.config.naming),
                      row.config.rootClasses, row.config.height, row.classes,
                      row.contextual.medianMs, row.coInit.medianMs, row.initSpeedup,
                      row.coInc.medianMs, row.incSpeedup,
                      row.breakEven < 0 ? "never"
                                        : std::to_string(row.breakEven).c_str(),
                      row.recomputedNodes, row.nodes);
        out << line;
    }
    return out.str();
}

std::string renderBenchRecords(const BenchReport& report) {
    std::ostringstream out;
    auto emit = [&](const BenchRow& row, const char* phase, const PhaseStats& stats,
                    std::size_t recomputed) {
        for (std::size_t i = 0; i < stats.samplesMs.size(); ++i) {
            nlohmann::json record{
                {"scheme", schemeName(row.config.scheme)},
                {"naming", namingName(row.config.naming)},
                {"k", row.config.rootClasses},
                {"h", row.config.height},
                {"phase", phase},
                {"rep", i},
                {"ns", static_cast<std::uint64_t>(stats.samplesMs[i] * 1e6)},
                {"recomputed", recomputed},
            };
            out << record << '\n';
        }
    };
    for (const BenchRow& row : report.rows) {
        emit(row, "contextual", row.contextual, 0);
        emit(row, "co-init", row.coInit, row.nodes);
        emit(row, "co-inc", row.coInc, row.recomputedNodes);
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Differential checking

namespace {

bool verdictsDisagree(const ProgramPtr& program, bool& contextualAccepted,
                      bool& coAccepted) {
    contextualAccepted = checkProgram(program).accepted;
    coAccepted = coCheckProgram(program).verdict.accepted;
    return contextualAccepted != coAccepted;
}

ProgramPtr shrinkDisagreement(ProgramPtr program) {
    auto stillDisagrees = [](const ProgramPtr& candidate) {
        bool a = false, b = false;
        return verdictsDisagree(candidate, a, b);
    };

    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        std::vector<ClassDeclPtr> decls = leaves(program);

        for (std::size_t i = 0; i < decls.size() && decls.size() > 1; ++i) {
            std::vector<ClassDeclPtr> trial = decls;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
            ProgramPtr candidate = balance(trial, 2);
            if (stillDisagrees(candidate)) {
                program = candidate;
                shrunk = true;
                break;
            }
        }
        if (shrunk)
            continue;

        for (std::size_t i = 0; i < decls.size() && !shrunk; ++i) {
            for (std::size_t m = 0; m < decls[i]->methods.size(); ++m) {
                auto copy = std::make_shared<ClassDecl>(*decls[i]);
                copy->methods.erase(copy->methods.begin() +
                                    static_cast<std::ptrdiff_t>(m));
                std::vector<ClassDeclPtr> trial = decls;
                trial[i] = copy;
                ProgramPtr candidate = balance(trial, 2);
                if (stillDisagrees(candidate)) {
                    program = candidate;
                    shrunk = true;
                    break;
                }
            }
        }
    }
    return program;
}

} // namespace

DiffReport diffCheck(const std::vector<DiffEntry>& corpus) {
    DiffReport report;
    for (const DiffEntry& entry : corpus) {
        report.total += 1;
        bool contextualAccepted = false, coAccepted = false;
        if (!verdictsDisagree(entry.program, contextualAccepted, coAccepted)) {
            report.agreements += 1;
            continue;
        }
        Disagreement bad;
        bad.name = entry.name;
        bad.contextualAccepted = contextualAccepted;
        bad.coContextualAccepted = coAccepted;
        bad.minimized = render(shrinkDisagreement(entry.program));
        report.disagreements.push_back(std::move(bad));
    }
    return report;
}

std::string renderDiffReport(const DiffReport& report) {
    std::ostringstream out;
    out << "checked " << report.total << " programs, " << report.agreements
        << " agreements";
    if (report.total > 0)
        out << " (" << (report.allAgree() ? "100" : "<100") << "%)";
    out << "\n";
    for (const Disagreement& bad : report.disagreements) {
        out << "DISAGREEMENT " << bad.name << ": contextual="
            << (bad.contextualAccepted ? "accept" : "reject")
            << " co-contextual=" << (bad.coContextualAccepted ? "accept" : "reject")
            << "\nminimized reproducer:\n"
            << bad.minimized << "\n";
    }
    return out.str();
}

} // namespace cocofj
