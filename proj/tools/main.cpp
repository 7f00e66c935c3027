// Batch driver for the ORAN/FL simulator: single experiments, multi-strategy
// comparisons, and verification of previously written output bundles.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oranfl/compare.hpp"
#include "oranfl/config.hpp"
#include "oranfl/errors.hpp"
#include "oranfl/output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string seed_override;
    int rounds_override = 0;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> seeds;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) seeds.push_back(std::stoull(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    return seeds;
}

oranfl::SimConfig load_config(const CommonOpts& opts) {
    oranfl::SimConfig cfg = oranfl::parse_config(opts.config_path);
    if (!opts.seed_override.empty()) {
        cfg.seeds = parse_seed_list(opts.seed_override);
    }
    if (opts.rounds_override > 0) {
        cfg.rounds = opts.rounds_override;
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed-override", opts.seed_override,
                    "comma-separated seed list replacing the config's seeds");
    cmd->add_option("--rounds-override", opts.rounds_override,
                    "round count replacing the config's rounds");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-RAT ORAN federated-learning simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    std::string run_strategy;
    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--strategy", run_strategy,
                        "selection strategy overriding the config "
                        "(fedora, fedavg-random, greedy, loss-ranked)");

    CommonOpts cmp_opts;
    std::vector<std::string> cmp_strategies;
    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "run several strategies on identical seeds and data");
    add_common(cmp_cmd, cmp_opts);
    cmp_cmd->add_option("--strategy", cmp_strategies,
                        "strategy to include (repeatable; default: all four)");

    std::string verify_dir;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "recompute the summary from emitted trace files");
    verify_cmd->add_option("--out", verify_dir, "output directory to verify")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            oranfl::SimConfig cfg = load_config(run_opts);
            if (!run_strategy.empty()) {
                const auto kind = oranfl::strategy_from_name(run_strategy);
                if (!kind) {
                    std::fprintf(stderr, "unknown strategy '%s'\n", run_strategy.c_str());
                    return kExitUsage;
                }
                cfg.fl.strategy.kind = *kind;
            }
            const auto outcome = oranfl::run_single(cfg, run_opts.out_dir);
            const auto& rep = outcome.result.report;
            std::printf("%s: accuracy %s, loss %s, qos %s, avg power %s W\n",
                        outcome.strategy.c_str(), oranfl::format_g6(rep.mean_accuracy).c_str(),
                        oranfl::format_g6(rep.mean_loss).c_str(),
                        oranfl::format_g6(rep.qos_satisfaction_rate).c_str(),
                        oranfl::format_g6(rep.avg_power_w).c_str());
            return kExitOk;
        }

        if (cmp_cmd->parsed()) {
            oranfl::SimConfig cfg = load_config(cmp_opts);
            std::vector<oranfl::StrategyKind> kinds;
            if (cmp_strategies.empty()) {
                kinds = {oranfl::StrategyKind::Fedora, oranfl::StrategyKind::FedavgRandom,
                         oranfl::StrategyKind::Greedy, oranfl::StrategyKind::LossRanked};
            } else {
                for (const auto& name : cmp_strategies) {
                    const auto kind = oranfl::strategy_from_name(name);
                    if (!kind) {
                        std::fprintf(stderr, "unknown strategy '%s'\n", name.c_str());
                        return kExitUsage;
                    }
                    kinds.push_back(*kind);
                }
            }
            const auto outcomes = oranfl::run_compare(cfg, kinds, cmp_opts.out_dir);
            for (const auto& o : outcomes) {
                const auto& rep = o.result.report;
                std::printf("%s: accuracy %s, loss %s, qos %s, avg power %s W\n",
                            o.strategy.c_str(), oranfl::format_g6(rep.mean_accuracy).c_str(),
                            oranfl::format_g6(rep.mean_loss).c_str(),
                            oranfl::format_g6(rep.qos_satisfaction_rate).c_str(),
                            oranfl::format_g6(rep.avg_power_w).c_str());
            }
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            const auto result = oranfl::verify_output_dir(verify_dir);
            if (result.ok) {
                std::printf("summary matches recomputation from trace files\n");
                return kExitOk;
            }
            for (const auto& m : result.mismatches) {
                std::fprintf(stderr, "%s\n", m.c_str());
            }
            return kExitRuntime;
        }
    } catch (const oranfl::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
