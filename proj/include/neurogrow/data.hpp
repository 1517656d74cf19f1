#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neurogrow/matrix.hpp"

namespace neurogrow {

enum class Task { Reconstruction, Classification };

/// One mini-batch. For reconstruction `targets` is used, for classification `labels`.
struct Batch {
    Matrix inputs;
    Matrix targets;
    std::vector<int> labels;

    std::size_t size() const { return inputs.rows(); }
};

struct Dataset {
    Matrix X;              // n_samples x n_features, values in [0,1]
    Matrix targets;        // reconstruction targets (equal-shaped to X) or empty
    std::vector<int> labels;
    std::size_t n_classes = 0;
    std::string name;
    Task task = Task::Classification;

    std::size_t size() const { return X.rows(); }
    std::size_t features() const { return X.cols(); }
    /// Output dimension a network for this dataset must have.
    std::size_t output_dim() const {
        return task == Task::Reconstruction ? X.cols() : n_classes;
    }
};

struct SplitSpec {
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
};

/// Load an IDX image/label pair. Gzip decompression is decided by `gz`
/// when given, otherwise by a .gz suffix on the path.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::optional<bool> gz = std::nullopt);

/// Write a dataset back out as a raw (uncompressed) IDX pair.
void write_idx(const Dataset& ds, const std::string& images_path,
               const std::string& labels_path);

/// Autoencoder-style variant: targets become the inputs themselves.
Dataset make_reconstruction(Dataset ds);

/// Gaussian clusters at seeded random centers, rescaled into [0,1].
Dataset synthetic_blobs(std::size_t n_classes, std::size_t n_per_class, std::size_t dim,
                        double spread, Rng& rng);

/// Seeded permutation, then partition into (train, val).
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

/// One epoch of seeded-shuffled mini-batches; the final short batch is included.
std::vector<Batch> batches(const Dataset& ds, std::size_t batch_size, Rng& rng);

/// The whole dataset as a single batch, in stored order.
Batch full_batch(const Dataset& ds);

/// Seeded sample of up to `n` rows (without replacement) as a single batch.
Batch sample_batch(const Dataset& ds, std::size_t n, Rng& rng);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace neurogrow
