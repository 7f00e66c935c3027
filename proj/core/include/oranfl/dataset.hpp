#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "oranfl/fl.hpp"
#include "oranfl/rng.hpp"

namespace oranfl {

// Synthetic Gaussian-blob classification task: one spherical Gaussian per
// class around a randomly drawn center.
struct BlobSpec {
    int n_classes = 10;
    int n_features = 16;
    double center_scale = 3.0;   // stddev of class-center coordinates
    double noise_std = 1.0;      // per-feature sample noise
};

// Class centers, row-major n_classes x n_features.
std::vector<double> make_blob_centers(const BlobSpec& spec, Rng& rng);

// Draws n samples: label ~ class_probs, features = center[label] + noise.
LocalDataset sample_blobs(const BlobSpec& spec, std::span<const double> centers,
                          std::span<const double> class_probs, int n, Rng& rng);

// CSV with header f0..f{d-1},label; label is an integer class id. Throws
// std::runtime_error with file:line context on malformed input.
LocalDataset load_csv(const std::filesystem::path& path);

// Shuffles rows and splits into (train, test) by the given train ratio.
std::pair<LocalDataset, LocalDataset> train_test_split(const LocalDataset& ds,
                                                       double train_ratio, Rng& rng);

// Splits a pooled dataset into n_clients shards. IID: shuffled near-equal
// chunks. Dirichlet: per-class proportions drawn from Dirichlet(alpha)
// (label skew). Every shard is left with at least one sample.
std::vector<LocalDataset> partition_dataset(const LocalDataset& ds, int n_clients,
                                            PartitionKind kind, double alpha, Rng& rng);

// Concatenates shards (used for centralized reference training).
LocalDataset concat_datasets(std::span<const LocalDataset> shards);

}  // namespace oranfl
