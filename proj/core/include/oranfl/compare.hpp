#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "oranfl/output.hpp"
#include "oranfl/sim.hpp"

namespace oranfl {

// Runs run_experiment once per strategy with identical seeds, topology, and
// datasets; only the selection strategy and the rApp enablement differ (the
// rApp runs for fedora, baselines use the fixed RAT at max power). Writes the
// output bundle into out_dir and returns the outcomes, sorted by strategy
// name. On failure a PARTIAL marker file is left in out_dir and the error is
// rethrown.
std::vector<StrategyOutcome> run_compare(const SimConfig& base,
                                         std::span<const StrategyKind> strategies,
                                         const std::filesystem::path& out_dir);

// Single-strategy run honoring the config as-is (strategy and rApp enablement
// from cfg); writes the same bundle layout.
StrategyOutcome run_single(const SimConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace oranfl
