// Test-only oracles, kept independent of the implementation paths they check:
// exhaustive enumeration for the proportional-fair allocator, central finite
// differences for gradients, two-pass variance, and a small chain MDP with a
// value-iteration solver.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "oranfl/fl.hpp"
#include "oranfl/net_model.hpp"
#include "oranfl/ric.hpp"
#include "oranfl/rng.hpp"

namespace oracles {

// Enumerates every composition of rat.prb_count into positive parts and
// maximizes sum_i log(n_i * bw * se_i). Objective ties (within 1e-9) prefer
// the lexicographically largest allocation in ascending client order, which
// matches the "remainder to lowest ids" convention.
inline std::map<int, int> brute_force_pf(std::vector<oranfl::RatClient> clients,
                                         const oranfl::RatProfile& rat) {
    std::sort(clients.begin(), clients.end(),
              [](const oranfl::RatClient& a, const oranfl::RatClient& b) {
                  return a.client_id < b.client_id;
              });
    const int n = static_cast<int>(clients.size());
    const int prbs = rat.prb_count;
    if (n > prbs) {
        throw std::invalid_argument("brute_force_pf: over-admitted");
    }

    std::vector<int> current(n, 1), best;
    double best_value = -1e300;
    const auto evaluate = [&](const std::vector<int>& alloc) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            v += std::log(alloc[i] * rat.prb_bandwidth_hz * clients[i].spectral_efficiency);
        }
        return v;
    };
    // Recursively place the remaining PRBs.
    const auto recurse = [&](auto&& self, int pos, int left) -> void {
        if (pos == n - 1) {
            current[pos] = 1 + left;
            const double v = evaluate(current);
            if (best.empty() || v > best_value + 1e-9 ||
                (v > best_value - 1e-9 && current > best)) {
                best_value = std::max(best_value, v);
                best = current;
            }
            return;
        }
        for (int extra = 0; extra <= left; ++extra) {
            current[pos] = 1 + extra;
            self(self, pos + 1, left - extra);
        }
    };
    recurse(recurse, 0, prbs - n);

    std::map<int, int> out;
    for (int i = 0; i < n; ++i) out[clients[i].client_id] = best[i];
    return out;
}

// Central finite differences of the mean loss, step h per coordinate.
inline std::vector<double> finite_diff_gradient(const oranfl::ModelShape& shape,
                                                const oranfl::ModelParams& params,
                                                const oranfl::LocalDataset& ds,
                                                std::span<const int> idx, double h) {
    std::vector<double> g(params.weights.size());
    oranfl::ModelParams probe = params;
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        probe.weights[k] = params.weights[k] + h;
        const double up = oranfl::mean_loss(shape, probe, ds, idx);
        probe.weights[k] = params.weights[k] - h;
        const double down = oranfl::mean_loss(shape, probe, ds, idx);
        probe.weights[k] = params.weights[k];
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

// Naive two-pass sample standard deviation (n-1 denominator).
inline double two_pass_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) sq += (x - mean) * (x - mean);
    return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

// Naive double-loop weighted mean of client updates.
inline oranfl::ModelParams naive_weighted_mean(std::span<const oranfl::ClientUpdate> updates) {
    double total = 0.0;
    for (const auto& u : updates) total += u.sample_count;
    oranfl::ModelParams out;
    out.weights.assign(updates[0].params.weights.size(), 0.0);
    for (std::size_t k = 0; k < out.weights.size(); ++k) {
        double acc = 0.0;
        for (const auto& u : updates) {
            acc += (u.sample_count / total) * u.params.weights[k];
        }
        out.weights[k] = acc;
    }
    return out;
}

// Four-state, two-action chain: RIGHT walks toward the terminal state 3
// (success probability 0.85) and pays 1.0 on arrival; LEFT steps back for a
// small immediate 0.05. With gamma 0.9 the optimal policy is RIGHT in every
// nonterminal state.
struct ChainMdp {
    static constexpr int n_states = 4;
    static constexpr int n_actions = 2;
    static constexpr int terminal = 3;
    static constexpr double gamma = 0.9;
    static constexpr double p_advance = 0.85;
    static constexpr double left_reward = 0.05;
    static constexpr double goal_reward = 1.0;

    struct Step {
        int next;
        double reward;
        bool done;
    };

    static Step step(int s, int a, oranfl::Rng& rng) {
        if (a == 0) {
            return {s > 0 ? s - 1 : 0, left_reward, false};
        }
        if (rng.uniform() < p_advance) {
            const int next = s + 1;
            if (next == terminal) return {terminal, goal_reward, true};
            return {next, 0.0, false};
        }
        return {s, 0.0, false};
    }

    // Expected transition list (next, prob, reward, done) for value iteration.
    static std::vector<std::tuple<int, double, double, bool>> transitions(int s, int a) {
        if (a == 0) {
            return {{s > 0 ? s - 1 : 0, 1.0, left_reward, false}};
        }
        const int next = s + 1;
        if (next == terminal) {
            return {{terminal, p_advance, goal_reward, true}, {s, 1.0 - p_advance, 0.0, false}};
        }
        return {{next, p_advance, 0.0, false}, {s, 1.0 - p_advance, 0.0, false}};
    }
};

// Value iteration on the chain MDP; returns the greedy policy over
// nonterminal states (ties to the lowest action index).
inline std::vector<int> value_iteration_policy(double* margin_out = nullptr) {
    std::vector<double> v(ChainMdp::n_states, 0.0);
    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<double> nv(ChainMdp::n_states, 0.0);
        double delta = 0.0;
        for (int s = 0; s < ChainMdp::terminal; ++s) {
            double best = -1e300;
            for (int a = 0; a < ChainMdp::n_actions; ++a) {
                double q = 0.0;
                for (const auto& [next, prob, reward, done] : ChainMdp::transitions(s, a)) {
                    q += prob * (reward + (done ? 0.0 : ChainMdp::gamma * v[next]));
                }
                best = std::max(best, q);
            }
            nv[s] = best;
            delta = std::max(delta, std::abs(nv[s] - v[s]));
        }
        v = nv;
        if (delta < 1e-12) break;
    }
    std::vector<int> policy(ChainMdp::terminal);
    double min_margin = 1e300;
    for (int s = 0; s < ChainMdp::terminal; ++s) {
        std::vector<double> q(ChainMdp::n_actions, 0.0);
        for (int a = 0; a < ChainMdp::n_actions; ++a) {
            for (const auto& [next, prob, reward, done] : ChainMdp::transitions(s, a)) {
                q[a] += prob * (reward + (done ? 0.0 : ChainMdp::gamma * v[next]));
            }
        }
        policy[s] = q[1] > q[0] ? 1 : 0;
        min_margin = std::min(min_margin, std::abs(q[1] - q[0]));
    }
    if (margin_out) *margin_out = min_margin;
    return policy;
}

}  // namespace oracles
