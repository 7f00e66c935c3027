#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oranfl/rng.hpp"

namespace oranfl {

// Shape of the native classifier: multinomial logistic regression when
// hidden_units == 0, one-hidden-layer tanh MLP otherwise.
struct ModelShape {
    int n_features = 0;
    int n_classes = 0;
    int hidden_units = 0;

    int dim() const;

    bool operator==(const ModelShape&) const = default;
};

// Flat parameter vector. One upload costs 32 bits per parameter
// (single-precision transfer, no compression).
struct ModelParams {
    std::vector<double> weights;

    int dim() const { return static_cast<int>(weights.size()); }
    std::int64_t payload_bits() const { return 32ll * dim(); }

    bool operator==(const ModelParams&) const = default;
};

enum class PartitionKind { Iid, Dirichlet };

// One data shard: row-major features, integer class labels.
struct LocalDataset {
    std::vector<double> features;   // n_samples x n_features
    std::vector<int> labels;
    int n_features = 0;

    int n_samples() const { return static_cast<int>(labels.size()); }
    std::span<const double> row(int i) const {
        return {features.data() + static_cast<std::size_t>(i) * n_features,
                static_cast<std::size_t>(n_features)};
    }

    bool operator==(const LocalDataset&) const = default;
};

// The unit of FL communication.
struct ClientUpdate {
    int client_id = 0;
    ModelParams params;
    int sample_count = 0;
    double local_loss = 0.0;
};

enum class StrategyKind { Fedora, FedavgRandom, Greedy, LossRanked };

const char* strategy_name(StrategyKind kind);
std::optional<StrategyKind> strategy_from_name(const std::string& name);

struct SelectionStrategy {
    StrategyKind kind = StrategyKind::Fedora;
    double fraction = 0.5;   // fedavg-random: share of eligible clients
    int top_k = 10;          // greedy / loss-ranked

    bool operator==(const SelectionStrategy&) const = default;
};

// Last two delivered local losses of one client, for loss-based selection.
struct LossHistory {
    std::optional<double> last_loss;
    std::optional<double> prev_loss;

    void record(double loss) {
        prev_loss = last_loss;
        last_loss = loss;
    }
};

struct EvalResult {
    double accuracy = 0.0;
    double loss = 0.0;
};

// Mean softmax cross-entropy over the given sample indices (all samples when
// idx is empty is not implied; pass the full index range explicitly).
double mean_loss(const ModelShape& shape, const ModelParams& params, const LocalDataset& ds,
                 std::span<const int> idx);
double mean_loss(const ModelShape& shape, const ModelParams& params, const LocalDataset& ds);

// Exact analytic gradient of the mean softmax cross-entropy over the batch.
std::vector<double> gradient(const ModelShape& shape, const ModelParams& params,
                             const LocalDataset& ds, std::span<const int> idx);
std::vector<double> gradient(const ModelShape& shape, const ModelParams& params,
                             const LocalDataset& ds);

// Mini-batch gradient descent with per-epoch shuffling driven by rng.
// Returns the updated params and the last epoch's mean loss (epochs = 0:
// params unchanged, loss = evaluation loss of the input params).
std::pair<ModelParams, double> local_train(const ModelShape& shape, const ModelParams& params,
                                           const LocalDataset& ds, int epochs, double lr,
                                           int batch_size, Rng& rng);

// Sample-count-weighted parameter mean. Updates are summed in ascending
// client_id order so results are bit-reproducible regardless of input order.
ModelParams fedavg_aggregate(std::span<const ClientUpdate> updates);

// Applies the selection strategy over the eligible set; returns ascending
// client ids. Clients with insufficient loss history rank above all others
// (cold-start priority). k larger than the eligible set clamps to all.
std::vector<int> select_clients(const SelectionStrategy& strategy,
                                const std::map<int, LossHistory>& history,
                                std::span<const int> eligible, Rng& rng);

// Accuracy (argmax prediction, ties to the lowest class id) and mean loss on
// the test set.
EvalResult evaluate(const ModelShape& shape, const ModelParams& params,
                    const LocalDataset& test);

// Deterministic parameter init: zero-mean normal entries scaled by init_scale
// (breaks hidden-layer symmetry for the MLP variant).
ModelParams init_params(const ModelShape& shape, double init_scale, Rng& rng);

}  // namespace oranfl
