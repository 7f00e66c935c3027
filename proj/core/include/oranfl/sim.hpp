#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oranfl/dataset.hpp"
#include "oranfl/errors.hpp"
#include "oranfl/fl.hpp"
#include "oranfl/net_model.hpp"
#include "oranfl/ric.hpp"

namespace oranfl {

// rApp / xApp hyperparameters.
struct ControllerConfig {
    bool rapp_enabled = true;       // false: fixed baseline RAT at max power
    int baseline_rat_id = 0;
    int rapp_period = 1;            // rApp acts every k-th round
    double alpha = 0.2;
    double gamma = 0.9;
    double epsilon = 0.2;
    double epsilon_decay = 0.97;
    double epsilon_min = 0.01;
    RewardWeights rewards;
    AllocationPolicy policy;
    std::vector<double> latency_bucket_edges = {0.05, 0.15, 0.5};
    std::vector<double> congestion_bucket_edges = {0.5, 1.0};

    bool operator==(const ControllerConfig&) const = default;
};

enum class ModelKind { Logistic, Mlp };
enum class DatasetKind { Blobs, Csv };

// Model, dataset, and selection settings of the FL loop.
struct FlConfig {
    ModelKind model = ModelKind::Logistic;
    int hidden_units = 16;          // used when model = mlp
    double lr = 0.1;
    int epochs = 1;
    int batch_size = 32;
    SelectionStrategy strategy;
    DatasetKind dataset = DatasetKind::Blobs;
    int n_features = 16;
    int n_classes = 10;
    int test_samples = 2000;
    double center_scale = 3.0;
    double noise_std = 1.0;
    PartitionKind partition = PartitionKind::Iid;
    double dirichlet_alpha = 0.5;
    std::string csv_path;
    double train_split = 0.8;
    double init_scale = 0.01;

    bool operator==(const FlConfig&) const = default;
};

// Complete declarative experiment description.
struct SimConfig {
    int rounds = 50;
    double deadline_s = 1.0;              // round upload deadline
    double min_round_duration_s = 0.001;  // floor of the round wall-clock
    double eps_out = 0.05;                // outage-probability budget
    std::vector<RatProfile> rats;
    std::vector<Pathway> pathways;
    std::vector<ClientNode> clients;
    ControllerConfig controller;
    FlConfig fl;
    std::vector<std::uint64_t> seeds = {1};

    bool operator==(const SimConfig&) const = default;
};

// Checks every config invariant; returns one entry per violation (empty =
// valid). Key paths match the config file schema.
std::vector<ConfigViolation> validate_config(const SimConfig& cfg);

// Convenience: throws std::invalid_argument listing all violations.
void require_valid(const SimConfig& cfg);

enum class DropReason { None, Outage, Deadline, NotSelected, Infeasible };

const char* drop_reason_name(DropReason r);

// Everything that happened to one client in one round.
struct ClientRound {
    Action action;                  // executed action; candidate when infeasible
    bool action_emitted = false;    // false for infeasible clients
    KpiReport kpi;
    bool included = false;          // update entered the aggregation
    DropReason drop = DropReason::None;
    int prbs = 0;
    int pathway_id = -1;            // -1: no pathway chosen
    double tx_power_w = 0.0;        // 0 when no transmission was attempted

    bool operator==(const ClientRound&) const = default;
};

struct RoundTrace {
    int round_index = 0;
    std::vector<ClientRound> clients;
    double accuracy = 0.0;          // global model after aggregation
    double loss = 0.0;
    double energy_j = 0.0;          // sum of per-client energies
    double wall_clock_s = 0.0;

    bool operator==(const RoundTrace&) const = default;
};

// Buckets the previous-round KPIs and per-RAT demand fractions into a
// discrete observation. No previous KPI: bucket 0, outage flag false.
RicObservation make_observation(const std::optional<KpiReport>& prev_kpi,
                                std::span<const double> congestion,
                                std::span<const double> latency_edges,
                                std::span<const double> congestion_edges);

// One seed's deterministic engine state: datasets, model, Q-table, KPI
// memory. run_round() advances the two-stage control loop by one FL round.
class Simulation {
  public:
    Simulation(const SimConfig& cfg, std::uint64_t seed);
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;

    RoundTrace run_round();

    int round() const;
    const std::vector<Action>& action_set() const;
    const ModelParams& global_params() const;
    const QTable& qtable() const;
    const LocalDataset& test_set() const;
    const std::vector<LocalDataset>& shards() const;
    const ModelShape& model_shape() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct SeedResult {
    std::uint64_t seed = 0;
    double final_accuracy = 0.0;
    double final_loss = 0.0;

    bool operator==(const SeedResult&) const = default;
};

// Table-style aggregate over all seeds of one experiment.
struct ExperimentReport {
    std::vector<SeedResult> per_seed;
    double mean_accuracy = 0.0;
    double accuracy_stddev = 0.0;     // sample std-dev, n-1 denominator
    double mean_loss = 0.0;
    double qos_satisfaction_rate = 0.0;
    double avg_power_w = 0.0;         // total energy / total device-time
    double total_energy_j = 0.0;
    double total_wall_clock_s = 0.0;  // sum of round wall-clocks over seeds

    bool operator==(const ExperimentReport&) const = default;
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<RoundTrace> rounds;
};

struct ExperimentResult {
    ExperimentReport report;
    std::vector<SeedRun> runs;
};

// Runs every seed with fresh rng, Q-table, and model init; fully
// deterministic per (config, seed). Invalid configs are rejected before any
// round runs.
ExperimentResult run_experiment(const SimConfig& cfg);

}  // namespace oranfl
