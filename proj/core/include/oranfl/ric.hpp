#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oranfl/net_model.hpp"
#include "oranfl/rng.hpp"

namespace oranfl {

// One rApp decision: which RAT and which entry of that RAT's power grid.
struct Action {
    int rat_id = 0;
    int power_level_index = 0;

    auto operator<=>(const Action&) const = default;
};

// Discretized network state observed by the rApp.
struct RicObservation {
    int latency_bucket = 0;
    bool outage_flag = false;
    std::vector<int> congestion_bucket;   // per RAT, ascending rat order

    bool operator==(const RicObservation&) const = default;
};

// Bucket dimensions of the observation space; encodes observations to the
// integer state codes the Q-table is keyed on.
struct ObservationSpace {
    int latency_buckets = 4;
    int congestion_buckets = 3;
    int n_rats = 1;

    std::uint64_t n_states() const;
    std::uint64_t encode(const RicObservation& obs) const;
};

// Tabular action-value store with epsilon-greedy hyperparameters. Unvisited
// entries read as zero.
class QTable {
  public:
    QTable(std::uint32_t n_actions, double alpha, double gamma, double epsilon,
           double epsilon_decay, double epsilon_min = 0.01);

    std::uint32_t n_actions() const { return n_actions_; }
    double get(std::uint64_t state, std::uint32_t action) const;
    void set(std::uint64_t state, std::uint32_t action, double value);
    double max_over_actions(std::uint64_t state) const;
    std::size_t visited_entries() const { return values_.size(); }

    // epsilon <- max(epsilon_min, epsilon * epsilon_decay)
    void decay_epsilon();

    double alpha = 0.1;
    double gamma = 0.9;
    double epsilon = 0.1;
    double epsilon_decay = 1.0;
    double epsilon_min = 0.01;

  private:
    std::uint32_t n_actions_;
    std::unordered_map<std::uint64_t, double> values_;
};

// Weights of the rApp's cost-based reward.
struct RewardWeights {
    double w_energy = 1.0;
    double w_latency = 1.0;
    double qos_penalty = 5.0;
    double energy_norm_j = 1.0;
    double latency_norm_s = 1.0;

    bool operator==(const RewardWeights&) const = default;
};

enum class PolicyKind { ProportionalFair, EqualShare, GreedyRate };

const char* policy_kind_name(PolicyKind kind);

// The xApp's model-based allocation rule.
struct AllocationPolicy {
    PolicyKind kind = PolicyKind::ProportionalFair;

    bool operator==(const AllocationPolicy&) const = default;
};

// Negative weighted normalized energy+latency cost, minus a penalty when the
// round missed QoS.
double reward(const KpiReport& kpi, const RewardWeights& w);

// One-step Q-learning update; returns the new Q(s,a).
double q_update(QTable& q, std::uint64_t state, std::uint32_t action, double r,
                std::uint64_t next_state);

// Epsilon-greedy over the raw action index space [0, n_actions). Ties break
// to the lowest index. A single-action table short-circuits without touching
// the rng.
std::uint32_t select_index(const QTable& q, std::uint64_t state, Rng& rng);

// Domain wrapper over select_index. `actions` must be sorted ascending by
// (rat_id, power_level_index) and indexed consistently with the Q-table, so
// the lowest-index tie-break equals the lexicographic rule.
Action select_action(const QTable& q, std::uint64_t state, std::span<const Action> actions,
                     Rng& rng);

// Effective mean SNR at a selected power level: mean_snr scales linearly with
// power relative to the RAT's maximum level.
double effective_mean_snr(const ClientNode& client, const RatProfile& rat,
                          int power_level_index);

// Escalates the candidate's power level until the analytic outage probability
// drops to eps_out; never decreases the level. nullopt = no level satisfies
// the constraint (client is outage-prone on that RAT this round).
std::optional<Action> outage_guard(const Action& candidate, const ClientNode& client,
                                   const RatProfile& rat, double eps_out);

// (client_id, spectral efficiency in bits/s/Hz) of one client admitted to a RAT.
struct RatClient {
    int client_id = 0;
    double spectral_efficiency = 0.0;
};

// Splits the RAT's PRB grid among the admitted clients; the result always sums
// to rat.prb_count. Proportional-fair throws OverAdmissionError when clients
// outnumber PRBs (it guarantees one PRB per client).
std::map<int, int> allocate_prbs(const AllocationPolicy& policy,
                                 std::span<const RatClient> clients_on_rat,
                                 const RatProfile& rat);

// Pathway with the smallest pathway_latency; ties break to the lowest id.
int select_pathway(std::span<const Pathway> pathways, double payload_bits, double rate_bps);

}  // namespace oranfl
