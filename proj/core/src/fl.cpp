#include "oranfl/fl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oranfl {

int ModelShape::dim() const {
    if (hidden_units == 0) {
        return n_classes * (n_features + 1);
    }
    return hidden_units * (n_features + 1) + n_classes * (hidden_units + 1);
}

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Fedora: return "fedora";
        case StrategyKind::FedavgRandom: return "fedavg-random";
        case StrategyKind::Greedy: return "greedy";
        case StrategyKind::LossRanked: return "loss-ranked";
    }
    return "?";
}

std::optional<StrategyKind> strategy_from_name(const std::string& name) {
    if (name == "fedora") return StrategyKind::Fedora;
    if (name == "fedavg-random") return StrategyKind::FedavgRandom;
    if (name == "greedy") return StrategyKind::Greedy;
    if (name == "loss-ranked") return StrategyKind::LossRanked;
    return std::nullopt;
}

namespace {

void check_shapes(const ModelShape& shape, const ModelParams& params, const LocalDataset& ds) {
    if (shape.n_features < 1 || shape.n_classes < 2 || shape.hidden_units < 0) {
        throw std::invalid_argument("model shape is degenerate");
    }
    if (params.dim() != shape.dim()) {
        throw std::invalid_argument("params dim " + std::to_string(params.dim()) +
                                    " does not match model dim " + std::to_string(shape.dim()));
    }
    if (ds.n_features != shape.n_features) {
        throw std::invalid_argument("dataset feature width does not match model");
    }
}

// Parameter layout offsets. Logistic: [W (c x f) | b (c)].
// MLP: [W1 (h x f) | b1 (h) | W2 (c x h) | b2 (c)].
struct Layout {
    int w1 = 0, b1 = 0, w2 = 0, b2 = 0;

    explicit Layout(const ModelShape& s) {
        if (s.hidden_units == 0) {
            w2 = 0;
            b2 = s.n_classes * s.n_features;
        } else {
            w1 = 0;
            b1 = s.hidden_units * s.n_features;
            w2 = b1 + s.hidden_units;
            b2 = w2 + s.n_classes * s.hidden_units;
        }
    }
};

// Computes logits (and hidden activations for the MLP) for one sample.
void forward(const ModelShape& s, const Layout& L, const double* w,
             std::span<const double> x, std::vector<double>& hidden,
             std::vector<double>& logits) {
    const int c = s.n_classes;
    if (s.hidden_units == 0) {
        for (int k = 0; k < c; ++k) {
            double z = w[L.b2 + k];
            const double* row = w + static_cast<std::size_t>(k) * s.n_features;
            for (int j = 0; j < s.n_features; ++j) z += row[j] * x[j];
            logits[k] = z;
        }
        return;
    }
    const int h = s.hidden_units;
    for (int i = 0; i < h; ++i) {
        double a = w[L.b1 + i];
        const double* row = w + L.w1 + static_cast<std::size_t>(i) * s.n_features;
        for (int j = 0; j < s.n_features; ++j) a += row[j] * x[j];
        hidden[i] = std::tanh(a);
    }
    for (int k = 0; k < c; ++k) {
        double z = w[L.b2 + k];
        const double* row = w + L.w2 + static_cast<std::size_t>(k) * h;
        for (int i = 0; i < h; ++i) z += row[i] * hidden[i];
        logits[k] = z;
    }
}

// Per-sample loss and softmax probabilities from logits.
double softmax_loss(std::span<const double> logits, int label, std::vector<double>& probs) {
    double m = logits[0];
    for (double z : logits) m = std::max(m, z);
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        probs[k] = std::exp(logits[k] - m);
        sum += probs[k];
    }
    const double lse = m + std::log(sum);
    for (double& p : probs) p /= sum;
    return lse - logits[label];
}

// Mean loss and (optionally) mean gradient over the given sample indices.
double loss_and_gradient(const ModelShape& s, const ModelParams& params,
                         const LocalDataset& ds, std::span<const int> idx,
                         std::vector<double>* grad_out) {
    check_shapes(s, params, ds);
    if (idx.empty()) {
        throw std::invalid_argument("empty batch");
    }
    for (int i : idx) {
        if (i < 0 || i >= ds.n_samples()) {
            throw std::invalid_argument("sample index out of range");
        }
        if (ds.labels[i] < 0 || ds.labels[i] >= s.n_classes) {
            throw std::invalid_argument("label out of range");
        }
    }

    const Layout L(s);
    const double* w = params.weights.data();
    const int c = s.n_classes;
    const int h = s.hidden_units;

    std::vector<double> hidden(std::max(h, 1));
    std::vector<double> logits(c);
    std::vector<double> probs(c);
    std::vector<double> dhidden(std::max(h, 1));

    if (grad_out) grad_out->assign(params.weights.size(), 0.0);
    double* g = grad_out ? grad_out->data() : nullptr;

    double total_loss = 0.0;
    for (int i : idx) {
        const auto x = ds.row(i);
        const int y = ds.labels[i];
        forward(s, L, w, x, hidden, logits);
        total_loss += softmax_loss(logits, y, probs);
        if (!g) continue;

        // dL/dz = p - onehot(y)
        probs[y] -= 1.0;
        if (h == 0) {
            for (int k = 0; k < c; ++k) {
                const double gk = probs[k];
                double* row = g + static_cast<std::size_t>(k) * s.n_features;
                for (int j = 0; j < s.n_features; ++j) row[j] += gk * x[j];
                g[L.b2 + k] += gk;
            }
        } else {
            for (int i2 = 0; i2 < h; ++i2) dhidden[i2] = 0.0;
            for (int k = 0; k < c; ++k) {
                const double gk = probs[k];
                double* row = g + L.w2 + static_cast<std::size_t>(k) * h;
                const double* w2row = w + L.w2 + static_cast<std::size_t>(k) * h;
                for (int i2 = 0; i2 < h; ++i2) {
                    row[i2] += gk * hidden[i2];
                    dhidden[i2] += gk * w2row[i2];
                }
                g[L.b2 + k] += gk;
            }
            for (int i2 = 0; i2 < h; ++i2) {
                const double d = dhidden[i2] * (1.0 - hidden[i2] * hidden[i2]);
                double* row = g + L.w1 + static_cast<std::size_t>(i2) * s.n_features;
                for (int j = 0; j < s.n_features; ++j) row[j] += d * x[j];
                g[L.b1 + i2] += d;
            }
        }
    }

    const double inv_n = 1.0 / static_cast<double>(idx.size());
    if (g) {
        for (std::size_t k = 0; k < params.weights.size(); ++k) g[k] *= inv_n;
    }
    return total_loss * inv_n;
}

std::vector<int> all_indices(const LocalDataset& ds) {
    std::vector<int> idx(ds.n_samples());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

}  // namespace

double mean_loss(const ModelShape& shape, const ModelParams& params, const LocalDataset& ds,
                 std::span<const int> idx) {
    return loss_and_gradient(shape, params, ds, idx, nullptr);
}

double mean_loss(const ModelShape& shape, const ModelParams& params, const LocalDataset& ds) {
    const auto idx = all_indices(ds);
    return mean_loss(shape, params, ds, idx);
}

std::vector<double> gradient(const ModelShape& shape, const ModelParams& params,
                             const LocalDataset& ds, std::span<const int> idx) {
    std::vector<double> g;
    loss_and_gradient(shape, params, ds, idx, &g);
    return g;
}

std::vector<double> gradient(const ModelShape& shape, const ModelParams& params,
                             const LocalDataset& ds) {
    const auto idx = all_indices(ds);
    return gradient(shape, params, ds, idx);
}

std::pair<ModelParams, double> local_train(const ModelShape& shape, const ModelParams& params,
                                           const LocalDataset& ds, int epochs, double lr,
                                           int batch_size, Rng& rng) {
    check_shapes(shape, params, ds);
    if (epochs < 0) {
        throw std::invalid_argument("local_train: negative epochs");
    }
    if (lr < 0.0) {
        throw std::invalid_argument("local_train: negative learning rate");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("local_train: batch_size must be positive");
    }
    if (ds.n_samples() < 1) {
        throw std::invalid_argument("local_train: empty dataset");
    }
    if (epochs == 0) {
        return {params, mean_loss(shape, params, ds)};
    }

    ModelParams out = params;
    std::vector<int> idx = all_indices(ds);
    const int n = ds.n_samples();
    std::vector<double> grad;
    double last_epoch_loss = 0.0;

    for (int e = 0; e < epochs; ++e) {
        rng.shuffle(idx);
        double loss_sum = 0.0;
        for (int start = 0; start < n; start += batch_size) {
            const int len = std::min(batch_size, n - start);
            const std::span<const int> batch(idx.data() + start, static_cast<std::size_t>(len));
            const double batch_loss = loss_and_gradient(shape, out, ds, batch, &grad);
            loss_sum += batch_loss * len;
            for (std::size_t k = 0; k < out.weights.size(); ++k) {
                out.weights[k] -= lr * grad[k];
            }
        }
        last_epoch_loss = loss_sum / n;
    }
    return {out, last_epoch_loss};
}

ModelParams fedavg_aggregate(std::span<const ClientUpdate> updates) {
    if (updates.empty()) {
        throw std::invalid_argument("fedavg_aggregate: empty update list");
    }
    const int dim = updates[0].params.dim();
    std::int64_t total = 0;
    for (const auto& u : updates) {
        if (u.params.dim() != dim) {
            throw std::invalid_argument("fedavg_aggregate: mismatched dims");
        }
        if (u.sample_count < 1) {
            throw std::invalid_argument("fedavg_aggregate: sample_count must be positive");
        }
        total += u.sample_count;
    }
    if (updates.size() == 1) {
        return updates[0].params;   // bit-identical single-update path
    }

    // Fixed ascending-client order keeps the floating-point sum reproducible
    // for any caller ordering.
    std::vector<std::size_t> order(updates.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].client_id < updates[b].client_id;
    });

    ModelParams out;
    out.weights.assign(dim, 0.0);
    for (std::size_t pos : order) {
        const auto& u = updates[pos];
        const double w = static_cast<double>(u.sample_count) / static_cast<double>(total);
        for (int k = 0; k < dim; ++k) {
            out.weights[k] += w * u.params.weights[k];
        }
    }
    return out;
}

std::vector<int> select_clients(const SelectionStrategy& strategy,
                                const std::map<int, LossHistory>& history,
                                std::span<const int> eligible, Rng& rng) {
    if (eligible.empty()) {
        throw std::invalid_argument("select_clients: eligible set is empty");
    }
    std::vector<int> ids(eligible.begin(), eligible.end());
    std::sort(ids.begin(), ids.end());

    const int n = static_cast<int>(ids.size());
    const auto last_loss_of = [&](int id) -> std::optional<double> {
        auto it = history.find(id);
        return it == history.end() ? std::nullopt : it->second.last_loss;
    };

    switch (strategy.kind) {
        case StrategyKind::Fedora:
            return ids;   // every non-infeasible scheduled client

        case StrategyKind::FedavgRandom: {
            if (!(strategy.fraction > 0.0) || strategy.fraction > 1.0) {
                throw std::invalid_argument("select_clients: fraction must be in (0,1]");
            }
            const int m = std::min(
                n, static_cast<int>(std::ceil(strategy.fraction * static_cast<double>(n))));
            rng.shuffle(ids);
            ids.resize(std::max(m, 1));
            std::sort(ids.begin(), ids.end());
            return ids;
        }

        case StrategyKind::Greedy: {
            if (strategy.top_k < 1) {
                throw std::invalid_argument("select_clients: top_k must be positive");
            }
            // Highest last loss first; never-trained clients rank as +inf.
            std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
                const double la = last_loss_of(a).value_or(
                    std::numeric_limits<double>::infinity());
                const double lb = last_loss_of(b).value_or(
                    std::numeric_limits<double>::infinity());
                if (la != lb) return la > lb;
                return a < b;
            });
            ids.resize(std::min(n, strategy.top_k));
            std::sort(ids.begin(), ids.end());
            return ids;
        }

        case StrategyKind::LossRanked: {
            if (strategy.top_k < 1) {
                throw std::invalid_argument("select_clients: top_k must be positive");
            }
            // Largest loss improvement first; clients without two recorded
            // losses are cold starts and rank above all others.
            const auto delta_of = [&](int id) -> std::optional<double> {
                auto it = history.find(id);
                if (it == history.end() || !it->second.last_loss || !it->second.prev_loss) {
                    return std::nullopt;
                }
                return *it->second.prev_loss - *it->second.last_loss;
            };
            std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
                const auto da = delta_of(a);
                const auto db = delta_of(b);
                if (da.has_value() != db.has_value()) return !da.has_value();
                if (da && db && *da != *db) return *da > *db;
                return a < b;
            });
            ids.resize(std::min(n, strategy.top_k));
            std::sort(ids.begin(), ids.end());
            return ids;
        }
    }
    throw std::logic_error("select_clients: unknown strategy");
}

EvalResult evaluate(const ModelShape& shape, const ModelParams& params,
                    const LocalDataset& test) {
    check_shapes(shape, params, test);
    if (test.n_samples() < 1) {
        throw std::invalid_argument("evaluate: empty test set");
    }
    const Layout L(shape);
    std::vector<double> hidden(std::max(shape.hidden_units, 1));
    std::vector<double> logits(shape.n_classes);
    std::vector<double> probs(shape.n_classes);

    int correct = 0;
    double loss_sum = 0.0;
    for (int i = 0; i < test.n_samples(); ++i) {
        const int y = test.labels[i];
        if (y < 0 || y >= shape.n_classes) {
            throw std::invalid_argument("evaluate: label out of range");
        }
        forward(shape, L, params.weights.data(), test.row(i), hidden, logits);
        loss_sum += softmax_loss(logits, y, probs);
        int pred = 0;   // strict > keeps the lowest class id on ties
        for (int k = 1; k < shape.n_classes; ++k) {
            if (logits[k] > logits[pred]) pred = k;
        }
        if (pred == y) ++correct;
    }
    const double n = static_cast<double>(test.n_samples());
    return {static_cast<double>(correct) / n, loss_sum / n};
}

ModelParams init_params(const ModelShape& shape, double init_scale, Rng& rng) {
    ModelParams p;
    p.weights.resize(shape.dim());
    for (double& w : p.weights) {
        w = rng.normal(0.0, init_scale);
    }
    return p;
}

}  // namespace oranfl
