#pragma once

#include <cstddef>
#include <vector>

#include "neurogrow/nn.hpp"

namespace neurogrow {

enum class ExtenderKind { Swe, Kaiming, Frobenius, FireflyLite };
enum class DistributorKind { Svod, Ras, SingleLayer };

/// Per-layer neuron counts {m_l} for one growth stage.
struct ExpansionPlan {
    int stage = 0;
    std::vector<std::size_t> per_layer_counts;

    std::size_t total() const;
};

/// Auxiliary coupling parameters for one layer's insertion phase:
/// w[j] is an n_old x n_in matrix for new neuron j, b is m x n_old.
/// Created all-zero, discarded after the merge.
struct CouplingSet {
    std::vector<Matrix> w;
    Matrix b;

    static CouplingSet zeros(std::size_t m, std::size_t n_old, std::size_t n_in);
};

/// Gradients with respect to a CouplingSet, same layout.
struct CouplingGrad {
    std::vector<Matrix> w;
    Matrix b;
};

/// Gating gradients dL/dz at z = 0, one per probe, for one hidden layer.
struct ProbeStats {
    std::size_t layer_index = 0;
    std::vector<double> gradients;

    std::size_t negative_votes() const;
};

struct GrowthCounters {
    std::size_t adjust_passes = 0;
};

// --- Shared-Weights Extender building blocks ---

/// Step (a): append m neurons to a hidden layer with Kaiming incoming weights,
/// zero biases, and all-zero outgoing columns in the next layer. Function
/// preserving: network outputs are unchanged.
void swe_insert(Network& net, std::size_t layer_index, std::size_t m, int stage, Rng& rng);

/// Network with the layer's base weights replaced by the effective
/// parameterization: new neurons gain the summed couplings, old neurons lose
/// their couplings to every new neuron.
Network swe_effective(const Network& net, std::size_t layer_index, std::size_t m,
                      const CouplingSet& couplings);

/// Gradient of the batch loss with respect to the couplings, evaluated at the
/// given coupling values. Optionally also returns the full gradient set of the
/// effective network (its next-layer entries drive the adjustment step).
CouplingGrad swe_coupling_grad(const Network& net, std::size_t layer_index, std::size_t m,
                               const CouplingSet& couplings, const Batch& batch,
                               LossKind kind, GradientSet* effective_grads = nullptr);

/// Fold the couplings into the base weights (Eqs. of the effective
/// parameterization become the new base); the CouplingSet is dead afterwards.
void swe_merge(Network& net, std::size_t layer_index, std::size_t m,
               const CouplingSet& couplings);

/// Full SWE insertion: insert, one plain gradient step on the couplings and
/// the next layer's parameters over adjust_batch, merge.
void swe_extend(Network& net, std::size_t layer_index, std::size_t m,
                const Batch& adjust_batch, LossKind kind, double lr, int stage, Rng& rng,
                GrowthCounters* counters = nullptr);

// --- Baseline extenders ---

/// m new neurons with Kaiming incoming and outgoing weights, zero biases.
void kaiming_extend(Network& net, std::size_t layer_index, std::size_t m, int stage,
                    Rng& rng);

/// kaiming_extend, then rescale the grown incoming and outgoing matrices so
/// each recovers its pre-expansion Frobenius norm.
void frobenius_extend(Network& net, std::size_t layer_index, std::size_t m, int stage,
                      Rng& rng);

/// Simplified candidate-pool method: pool_factor x m function-preserving
/// candidates, candidate-only training for candidate_epochs, top-m selection
/// by gating-gradient magnitude.
void firefly_lite_extend(Network& net, std::size_t layer_index, std::size_t m,
                         const std::vector<Batch>& train_batches, LossKind kind, double lr,
                         int stage, Rng& rng, std::size_t pool_factor = 5,
                         std::size_t candidate_epochs = 1);

// --- Distributors ---

/// Virtual probe gating gradients for one hidden layer; the network is never
/// mutated.
ProbeStats probe_gradients(const Network& net, std::size_t layer_index,
                           std::size_t probes_per_layer, const Batch& eval_batch,
                           LossKind kind, Rng& rng);

/// Negative-probe voting with largest-remainder apportionment; uniform
/// fallback when no probe votes.
ExpansionPlan svod_allocate(const Network& net, std::size_t total_m,
                            std::size_t probes_per_layer, const Batch& eval_batch,
                            LossKind kind, Rng& rng, int stage = 0);

/// Each neuron independently assigned to a uniformly random hidden layer.
ExpansionPlan ras_allocate(std::size_t total_m, std::size_t n_hidden_layers, Rng& rng,
                           int stage = 0);

/// Largest-remainder apportionment of `total` over proportional `weights`;
/// ties break toward lower index.
std::vector<std::size_t> largest_remainder(std::size_t total,
                                           const std::vector<double>& weights);

// --- Plan application ---

struct ExtenderContext {
    Batch adjust_batch;                // SWE adjustment data
    std::vector<Batch> train_batches;  // FireflyLite candidate training data
    LossKind loss = LossKind::Mse;
    double lr = 1e-3;
    std::size_t pool_factor = 5;
    std::size_t candidate_epochs = 1;
    GrowthCounters* counters = nullptr;
};

/// Apply the extender to each hidden layer in input-to-output order, skipping
/// zero counts. SWE adjustment passes see all earlier layers already merged.
void apply_plan(Network& net, const ExpansionPlan& plan, ExtenderKind extender,
                const ExtenderContext& ctx, Rng& rng);

}  // namespace neurogrow
