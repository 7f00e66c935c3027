#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oranfl/sim.hpp"

namespace oranfl {

// One strategy's experiment outcome, as consumed by the output writers.
struct StrategyOutcome {
    std::string strategy;
    ExperimentResult result;
};

// %.6g formatting used for every floating-point datum in the output files.
std::string format_g6(double v);

// Value as it survives the 6-significant-digit file round trip.
double round6(double v);

// Writes the deterministic output bundle into out_dir:
//   curves.csv             per-round accuracy/loss/energy/wall-clock rows
//   trace_seed<seed>.csv   per round x client x strategy KPI rows
//   summary.txt            one fixed-width row per strategy
// Summary values are aggregated from the rounded values emitted into the CSV
// files, so a verification pass over the files reproduces them exactly. All
// files are written atomically (temp file + rename).
void write_output_bundle(const std::filesystem::path& out_dir,
                         const SimConfig& cfg,
                         std::span<const StrategyOutcome> outcomes);

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> mismatches;
};

// Re-derives the summary table from curves.csv and the per-seed trace files
// and compares it field by field against summary.txt.
VerifyResult verify_output_dir(const std::filesystem::path& out_dir);

// Name of the marker file left behind when a compare run aborts midway.
inline const char* partial_marker_name() { return "PARTIAL"; }

}  // namespace oranfl
