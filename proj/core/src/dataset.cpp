#include "oranfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oranfl {

std::vector<double> make_blob_centers(const BlobSpec& spec, Rng& rng) {
    std::vector<double> centers(static_cast<std::size_t>(spec.n_classes) * spec.n_features);
    for (double& c : centers) {
        c = rng.normal(0.0, spec.center_scale);
    }
    return centers;
}

LocalDataset sample_blobs(const BlobSpec& spec, std::span<const double> centers,
                          std::span<const double> class_probs, int n, Rng& rng) {
    if (static_cast<int>(class_probs.size()) != spec.n_classes) {
        throw std::invalid_argument("sample_blobs: class_probs arity mismatch");
    }
    LocalDataset ds;
    ds.n_features = spec.n_features;
    ds.features.resize(static_cast<std::size_t>(n) * spec.n_features);
    ds.labels.resize(n);

    for (int i = 0; i < n; ++i) {
        // Inverse-CDF draw over the class distribution.
        const double u = rng.uniform();
        int label = spec.n_classes - 1;
        double acc = 0.0;
        for (int c = 0; c < spec.n_classes; ++c) {
            acc += class_probs[c];
            if (u < acc) {
                label = c;
                break;
            }
        }
        ds.labels[i] = label;
        const double* center = centers.data() + static_cast<std::size_t>(label) * spec.n_features;
        double* row = ds.features.data() + static_cast<std::size_t>(i) * spec.n_features;
        for (int j = 0; j < spec.n_features; ++j) {
            row[j] = center[j] + rng.normal(0.0, spec.noise_std);
        }
    }
    return ds;
}

LocalDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path.string());
    }
    const std::string where = path.string();

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(where + ":1: empty dataset file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // Header must be f0,...,f{d-1},label.
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
    }
    if (cols.size() < 2 || cols.back() != "label") {
        throw std::runtime_error(where + ":1: header must be f0..f{d-1},label");
    }
    const int d = static_cast<int>(cols.size()) - 1;
    for (int j = 0; j < d; ++j) {
        if (cols[j] != "f" + std::to_string(j)) {
            throw std::runtime_error(where + ":1: unexpected column '" + cols[j] +
                                     "', expected f" + std::to_string(j));
        }
    }

    LocalDataset ds;
    ds.n_features = d;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw std::runtime_error(where + ":" + std::to_string(line_no) +
                                         ": bad numeric value '" + cell + "'");
            }
            if (col < d) {
                ds.features.push_back(v);
            } else if (col == d) {
                const int label = static_cast<int>(v);
                if (static_cast<double>(label) != v || label < 0) {
                    throw std::runtime_error(where + ":" + std::to_string(line_no) +
                                             ": label must be a nonnegative integer");
                }
                ds.labels.push_back(label);
            }
            ++col;
        }
        if (col != d + 1) {
            throw std::runtime_error(where + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(d + 1) + " columns, got " +
                                     std::to_string(col));
        }
    }
    if (ds.labels.empty()) {
        throw std::runtime_error(where + ": dataset has no rows");
    }
    return ds;
}

namespace {

LocalDataset take_rows(const LocalDataset& ds, std::span<const int> rows) {
    LocalDataset out;
    out.n_features = ds.n_features;
    out.features.reserve(rows.size() * ds.n_features);
    out.labels.reserve(rows.size());
    for (int r : rows) {
        const auto row = ds.row(r);
        out.features.insert(out.features.end(), row.begin(), row.end());
        out.labels.push_back(ds.labels[r]);
    }
    return out;
}

}  // namespace

std::pair<LocalDataset, LocalDataset> train_test_split(const LocalDataset& ds,
                                                       double train_ratio, Rng& rng) {
    if (!(train_ratio > 0.0) || !(train_ratio < 1.0)) {
        throw std::invalid_argument("train_test_split: ratio must be in (0,1)");
    }
    std::vector<int> rows(ds.n_samples());
    std::iota(rows.begin(), rows.end(), 0);
    rng.shuffle(rows);
    const int n_train = std::max(
        1, std::min(ds.n_samples() - 1,
                    static_cast<int>(std::floor(train_ratio * ds.n_samples()))));
    const std::span<const int> all(rows);
    return {take_rows(ds, all.subspan(0, n_train)), take_rows(ds, all.subspan(n_train))};
}

std::vector<LocalDataset> partition_dataset(const LocalDataset& ds, int n_clients,
                                            PartitionKind kind, double alpha, Rng& rng) {
    if (n_clients < 1) {
        throw std::invalid_argument("partition_dataset: need at least one client");
    }
    if (ds.n_samples() < n_clients) {
        throw std::invalid_argument("partition_dataset: fewer samples than clients");
    }

    std::vector<std::vector<int>> assignment(n_clients);

    if (kind == PartitionKind::Iid) {
        std::vector<int> rows(ds.n_samples());
        std::iota(rows.begin(), rows.end(), 0);
        rng.shuffle(rows);
        // Near-equal contiguous chunks; the first n%k shards get one extra.
        const int base = ds.n_samples() / n_clients;
        const int rem = ds.n_samples() % n_clients;
        int pos = 0;
        for (int c = 0; c < n_clients; ++c) {
            const int len = base + (c < rem ? 1 : 0);
            assignment[c].assign(rows.begin() + pos, rows.begin() + pos + len);
            pos += len;
        }
    } else {
        // Dirichlet label skew: split each class across clients by a
        // Dirichlet(alpha) proportion draw.
        int n_classes = 0;
        for (int l : ds.labels) n_classes = std::max(n_classes, l + 1);
        std::vector<std::vector<int>> by_class(n_classes);
        for (int i = 0; i < ds.n_samples(); ++i) {
            by_class[ds.labels[i]].push_back(i);
        }
        for (int c = 0; c < n_classes; ++c) {
            auto& rows = by_class[c];
            rng.shuffle(rows);
            const auto props = rng.dirichlet(alpha, n_clients);
            // Cumulative rounding so every class sample lands exactly once.
            const int m = static_cast<int>(rows.size());
            double acc = 0.0;
            int taken = 0;
            for (int k = 0; k < n_clients; ++k) {
                acc += props[k];
                const int upto = (k == n_clients - 1)
                                     ? m
                                     : std::min(m, static_cast<int>(std::floor(acc * m + 0.5)));
                for (; taken < upto; ++taken) {
                    assignment[k].push_back(rows[taken]);
                }
            }
        }
        // Keep every shard nonempty: move one row from the largest shard.
        for (int c = 0; c < n_clients; ++c) {
            if (!assignment[c].empty()) continue;
            int donor = 0;
            for (int k = 1; k < n_clients; ++k) {
                if (assignment[k].size() > assignment[donor].size()) donor = k;
            }
            assignment[c].push_back(assignment[donor].back());
            assignment[donor].pop_back();
        }
        for (auto& rows : assignment) {
            std::sort(rows.begin(), rows.end());
        }
    }

    std::vector<LocalDataset> shards;
    shards.reserve(n_clients);
    for (const auto& rows : assignment) {
        shards.push_back(take_rows(ds, rows));
    }
    return shards;
}

LocalDataset concat_datasets(std::span<const LocalDataset> shards) {
    LocalDataset out;
    if (shards.empty()) return out;
    out.n_features = shards[0].n_features;
    for (const auto& s : shards) {
        if (s.n_features != out.n_features) {
            throw std::invalid_argument("concat_datasets: mismatched feature widths");
        }
        out.features.insert(out.features.end(), s.features.begin(), s.features.end());
        out.labels.insert(out.labels.end(), s.labels.begin(), s.labels.end());
    }
    return out;
}

}  // namespace oranfl
