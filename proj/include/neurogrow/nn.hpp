#pragma once

#include <cstdint>
#include <vector>

#include "neurogrow/data.hpp"
#include "neurogrow/matrix.hpp"

namespace neurogrow {

enum class OutputHead { Identity, Logits };
enum class LossKind { Mse, SoftmaxCe };

/// Per-neuron provenance: the growth stage the neuron was created in
/// (0 = present at initial construction).
struct NeuronTag {
    int birth_stage = 0;
    friend bool operator==(const NeuronTag&, const NeuronTag&) = default;
};

struct DenseLayer {
    Matrix weights;               // n_out x n_in
    std::vector<double> biases;   // n_out
    std::vector<NeuronTag> tags;  // n_out

    std::size_t out_dim() const { return weights.rows(); }
    std::size_t in_dim() const { return weights.cols(); }
};

/// Fully connected ReLU network. All layers except the last are hidden;
/// the last is the output head (identity or logits-for-softmax).
struct Network {
    std::vector<DenseLayer> layers;
    OutputHead head = OutputHead::Identity;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.back().out_dim(); }
    std::size_t n_hidden() const { return layers.size() - 1; }
    std::size_t hidden_width(std::size_t l) const { return layers[l].out_dim(); }
    std::size_t total_hidden_width() const;
    std::size_t parameter_count() const;

    /// Throws DimensionError if adjacent layer shapes are incompatible.
    void check_consistent() const;

    static Network make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                            std::size_t output_dim, OutputHead head, Rng& rng);
};

struct ForwardTrace {
    Matrix input;
    std::vector<Matrix> pre;  // preactivations u_l, batch x n_l
    std::vector<Matrix> act;  // activations h_l (ReLU for hidden, head for last)

    const Matrix& output() const { return act.back(); }
};

struct TensorPair {
    Matrix weights;
    std::vector<double> biases;
};

struct GradientSet {
    std::vector<TensorPair> layers;  // dW, db per layer
    std::vector<Matrix> delta;       // dL/du_l, batch x n_l, batch-mean scaled
};

struct AdamState {
    std::vector<TensorPair> m;
    std::vector<TensorPair> v;
    std::int64_t step = 0;

    static AdamState for_network(const Network& net);

    /// After an expansion: moments of surviving parameters are preserved
    /// positionally, new entries start at zero, the step counter is kept.
    void resize_to(const Network& net);
};

struct EpochMetrics {
    double loss = 0.0;
    double accuracy = -1.0;  // < 0 when not a classification run
};

/// Entries i.i.d. normal with mean 0, stddev sqrt(2 / n_in).
Matrix kaiming_init(std::size_t n_out, std::size_t n_in, Rng& rng);

/// n normal draws with stddev sqrt(2 / fan_in).
std::vector<double> kaiming_vector(std::size_t n, std::size_t fan_in, Rng& rng);

ForwardTrace forward(const Network& net, const Matrix& X);

double loss_mse(const Matrix& pred, const Matrix& target);
double loss_softmax_ce(const Matrix& logits, const std::vector<int>& labels);

/// Loss of a batch given its forward output.
double batch_loss(const Matrix& output, const Batch& batch, LossKind kind);

GradientSet backward(const Network& net, const ForwardTrace& trace, const Batch& batch,
                     LossKind kind);

/// Standard Adam (beta1 0.9, beta2 0.999, eps 1e-8, bias correction);
/// increments state.step exactly once.
void adam_step(Network& net, const GradientSet& grads, AdamState& state, double lr);

/// Mini-batch Adam training with seeded shuffling; one EpochMetrics per epoch.
std::vector<EpochMetrics> train(Network& net, AdamState& state, const Dataset& data,
                                std::size_t epochs, std::size_t batch_size, double lr,
                                LossKind kind, Rng& shuffle_rng);

LossKind loss_for_task(Task task);

}  // namespace neurogrow
