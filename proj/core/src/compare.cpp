#include "oranfl/compare.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

namespace oranfl {

namespace {

void write_partial_marker(const std::filesystem::path& out_dir, const std::string& reason) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream out(out_dir / partial_marker_name());
    out << reason << "\n";
}

void clear_partial_marker(const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::remove(out_dir / partial_marker_name(), ec);
}

}  // namespace

std::vector<StrategyOutcome> run_compare(const SimConfig& base,
                                         std::span<const StrategyKind> strategies,
                                         const std::filesystem::path& out_dir) {
    if (strategies.empty()) {
        throw std::invalid_argument("run_compare: at least one strategy required");
    }
    std::set<StrategyKind> unique(strategies.begin(), strategies.end());
    if (unique.size() != strategies.size()) {
        throw std::invalid_argument("run_compare: duplicate strategies");
    }

    try {
        std::vector<StrategyOutcome> outcomes;
        for (StrategyKind kind : unique) {
            SimConfig cfg = base;
            cfg.fl.strategy.kind = kind;
            // Identical seeds, topology, and datasets across strategies; only
            // the selection rule and the controller enablement differ. The
            // baselines run the fixed RAT at maximum power.
            cfg.controller.rapp_enabled = (kind == StrategyKind::Fedora);
            outcomes.push_back({strategy_name(kind), run_experiment(cfg)});
        }
        std::sort(outcomes.begin(), outcomes.end(),
                  [](const StrategyOutcome& a, const StrategyOutcome& b) {
                      return a.strategy < b.strategy;
                  });
        write_output_bundle(out_dir, base, outcomes);
        clear_partial_marker(out_dir);
        return outcomes;
    } catch (...) {
        write_partial_marker(out_dir, "compare run aborted before all outputs were written");
        throw;
    }
}

StrategyOutcome run_single(const SimConfig& cfg, const std::filesystem::path& out_dir) {
    try {
        StrategyOutcome outcome{strategy_name(cfg.fl.strategy.kind), run_experiment(cfg)};
        write_output_bundle(out_dir, cfg, {&outcome, 1});
        clear_partial_marker(out_dir);
        return outcome;
    } catch (...) {
        write_partial_marker(out_dir, "run aborted before all outputs were written");
        throw;
    }
}

}  // namespace oranfl
