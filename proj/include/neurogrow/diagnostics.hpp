#pragma once

#include <optional>

#include "neurogrow/nn.hpp"

namespace neurogrow {

struct LayerInactivity {
    std::size_t total_neurons = 0;
    std::size_t inactive_total = 0;
    std::size_t new_total = 0;     // neurons with birth_stage == queried stage
    std::size_t inactive_new = 0;
};

struct InactivityReport {
    std::vector<LayerInactivity> layers;

    std::size_t total_neurons() const;
    std::size_t inactive_total() const;
    std::size_t new_total() const;
    std::size_t inactive_new() const;
    double pct_inactive_total() const;
    /// Inactive percentage among neurons born at the queried stage.
    double pct_inactive_new() const;
};

/// A hidden neuron is inactive iff its post-ReLU output is exactly 0 for
/// every sample. Streams in batches; results are identical to a whole-dataset
/// scan.
InactivityReport measure_inactivity(const Network& net, const Matrix& X,
                                    std::optional<int> stage_filter = std::nullopt,
                                    std::size_t batch_size = 256);

struct EvalResult {
    double loss = 0.0;
    std::optional<double> accuracy;  // classification only
    std::size_t sample_count = 0;
};

/// Mean loss over all samples (MSE or softmax CE per task); batch-order
/// independent.
EvalResult evaluate(const Network& net, const Dataset& data, Task task,
                    std::size_t batch_size = 256);

/// Central finite differences on every parameter vs backward; returns the
/// maximum relative error (absolute comparison where both sides are ~0).
double grad_check(const Network& net, const Batch& batch, LossKind kind,
                  double step = 1e-6);

}  // namespace neurogrow
