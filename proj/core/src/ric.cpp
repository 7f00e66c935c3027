#include "oranfl/ric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oranfl/errors.hpp"

namespace oranfl {

std::uint64_t ObservationSpace::n_states() const {
    std::uint64_t n = static_cast<std::uint64_t>(latency_buckets) * 2u;
    for (int r = 0; r < n_rats; ++r) n *= static_cast<std::uint64_t>(congestion_buckets);
    return n;
}

std::uint64_t ObservationSpace::encode(const RicObservation& obs) const {
    if (obs.latency_bucket < 0 || obs.latency_bucket >= latency_buckets) {
        throw std::invalid_argument("ObservationSpace::encode: latency bucket out of range");
    }
    if (static_cast<int>(obs.congestion_bucket.size()) != n_rats) {
        throw std::invalid_argument("ObservationSpace::encode: wrong congestion arity");
    }
    std::uint64_t code = static_cast<std::uint64_t>(obs.latency_bucket);
    code = code * 2u + (obs.outage_flag ? 1u : 0u);
    for (int r = 0; r < n_rats; ++r) {
        const int b = obs.congestion_bucket[r];
        if (b < 0 || b >= congestion_buckets) {
            throw std::invalid_argument("ObservationSpace::encode: congestion bucket out of range");
        }
        code = code * static_cast<std::uint64_t>(congestion_buckets) +
               static_cast<std::uint64_t>(b);
    }
    return code;
}

QTable::QTable(std::uint32_t n_actions, double alpha, double gamma, double epsilon,
               double epsilon_decay, double epsilon_min)
    : alpha(alpha),
      gamma(gamma),
      epsilon(epsilon),
      epsilon_decay(epsilon_decay),
      epsilon_min(epsilon_min),
      n_actions_(n_actions) {
    if (n_actions == 0) {
        throw std::invalid_argument("QTable: empty action set");
    }
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("QTable: alpha must be in (0,1]");
    }
}

double QTable::get(std::uint64_t state, std::uint32_t action) const {
    auto it = values_.find(state * n_actions_ + action);
    return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(std::uint64_t state, std::uint32_t action, double value) {
    values_[state * n_actions_ + action] = value;
}

double QTable::max_over_actions(std::uint64_t state) const {
    double best = get(state, 0);
    for (std::uint32_t a = 1; a < n_actions_; ++a) {
        best = std::max(best, get(state, a));
    }
    return best;
}

void QTable::decay_epsilon() {
    epsilon = std::max(epsilon_min, epsilon * epsilon_decay);
}

const char* policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::ProportionalFair: return "proportional-fair";
        case PolicyKind::EqualShare: return "equal-share";
        case PolicyKind::GreedyRate: return "greedy-rate";
    }
    return "?";
}

double reward(const KpiReport& kpi, const RewardWeights& w) {
    double cost = w.w_energy * kpi.energy_j / w.energy_norm_j +
                  w.w_latency * kpi.latency_s / w.latency_norm_s;
    if (!kpi.qos_met) {
        cost += w.qos_penalty;
    }
    return -cost;
}

double q_update(QTable& q, std::uint64_t state, std::uint32_t action, double r,
                std::uint64_t next_state) {
    const double old = q.get(state, action);
    const double target = r + q.gamma * q.max_over_actions(next_state);
    const double updated = old + q.alpha * (target - old);
    q.set(state, action, updated);
    return updated;
}

std::uint32_t select_index(const QTable& q, std::uint64_t state, Rng& rng) {
    const std::uint32_t n = q.n_actions();
    if (n == 1) {
        return 0;   // single-action identity, rng untouched
    }
    if (q.epsilon > 0.0 && rng.uniform() < q.epsilon) {
        return static_cast<std::uint32_t>(rng.uniform_int(n));
    }
    std::uint32_t best = 0;
    double best_value = q.get(state, 0);
    for (std::uint32_t a = 1; a < n; ++a) {
        const double v = q.get(state, a);
        if (v > best_value) {
            best_value = v;
            best = a;
        }
    }
    return best;
}

Action select_action(const QTable& q, std::uint64_t state, std::span<const Action> actions,
                     Rng& rng) {
    if (actions.empty()) {
        throw std::invalid_argument("select_action: empty action set");
    }
    if (actions.size() != q.n_actions()) {
        throw std::invalid_argument("select_action: action set does not match table arity");
    }
    return actions[select_index(q, state, rng)];
}

double effective_mean_snr(const ClientNode& client, const RatProfile& rat,
                          int power_level_index) {
    const double mean = client.mean_snr.at(rat.rat_id);
    return mean * rat.power_levels_w.at(power_level_index) / rat.max_power_w();
}

std::optional<Action> outage_guard(const Action& candidate, const ClientNode& client,
                                   const RatProfile& rat, double eps_out) {
    if (!(eps_out > 0.0) || !(eps_out < 1.0)) {
        throw std::invalid_argument("outage_guard: eps_out must be in (0,1)");
    }
    const int levels = static_cast<int>(rat.power_levels_w.size());
    for (int idx = candidate.power_level_index; idx < levels; ++idx) {
        const double eff = effective_mean_snr(client, rat, idx);
        if (outage_probability(eff, rat.outage_snr_threshold) <= eps_out) {
            return Action{candidate.rat_id, idx};
        }
    }
    return std::nullopt;
}

std::map<int, int> allocate_prbs(const AllocationPolicy& policy,
                                 std::span<const RatClient> clients_on_rat,
                                 const RatProfile& rat) {
    if (clients_on_rat.empty()) {
        throw std::invalid_argument("allocate_prbs: no clients");
    }
    for (const auto& c : clients_on_rat) {
        if (!(c.spectral_efficiency > 0.0)) {
            throw std::invalid_argument("allocate_prbs: spectral efficiency must be positive");
        }
    }
    std::vector<RatClient> clients(clients_on_rat.begin(), clients_on_rat.end());
    std::sort(clients.begin(), clients.end(),
              [](const RatClient& a, const RatClient& b) { return a.client_id < b.client_id; });

    const int n = static_cast<int>(clients.size());
    const int prbs = rat.prb_count;
    std::map<int, int> out;

    switch (policy.kind) {
        case PolicyKind::EqualShare: {
            const int base = prbs / n;
            const int rem = prbs % n;
            for (int i = 0; i < n; ++i) {
                out[clients[i].client_id] = base + (i < rem ? 1 : 0);
            }
            break;
        }
        case PolicyKind::GreedyRate: {
            int best = 0;
            for (int i = 1; i < n; ++i) {
                if (clients[i].spectral_efficiency > clients[best].spectral_efficiency) {
                    best = i;
                }
            }
            for (int i = 0; i < n; ++i) {
                out[clients[i].client_id] = (i == best) ? prbs : 0;
            }
            break;
        }
        case PolicyKind::ProportionalFair: {
            if (n > prbs) {
                throw OverAdmissionError("allocate_prbs: " + std::to_string(n) +
                                         " clients for " + std::to_string(prbs) + " PRBs");
            }
            // Greedy marginal gain on sum_i log(n_i * bw * se_i): the gain of
            // one more PRB for client i is log((n_i+1)/n_i), decreasing in
            // n_i, so the argmax is always a client with the fewest PRBs
            // (ties to the lowest id). Optimal for this concave separable
            // objective.
            std::vector<int> counts(n, 1);
            for (int left = prbs - n; left > 0; --left) {
                int pick = 0;
                for (int i = 1; i < n; ++i) {
                    if (counts[i] < counts[pick]) pick = i;
                }
                ++counts[pick];
            }
            for (int i = 0; i < n; ++i) {
                out[clients[i].client_id] = counts[i];
            }
            break;
        }
    }
    return out;
}

int select_pathway(std::span<const Pathway> pathways, double payload_bits, double rate_bps) {
    if (pathways.empty()) {
        throw std::invalid_argument("select_pathway: no pathways configured");
    }
    int best_id = pathways[0].pathway_id;
    double best_latency = pathway_latency(pathways[0], payload_bits, rate_bps);
    for (std::size_t i = 1; i < pathways.size(); ++i) {
        const double lat = pathway_latency(pathways[i], payload_bits, rate_bps);
        if (lat < best_latency ||
            (lat == best_latency && pathways[i].pathway_id < best_id)) {
            best_latency = lat;
            best_id = pathways[i].pathway_id;
        }
    }
    return best_id;
}

}  // namespace oranfl
