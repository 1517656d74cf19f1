#include "neurogrow/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace neurogrow {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

void check_finite_grads(const GradientSet& grads) {
    for (const auto& g : grads.layers) {
        if (!all_finite(g.weights)) throw NumericalError("non-finite weight gradient");
        for (double v : g.biases)
            if (!std::isfinite(v)) throw NumericalError("non-finite bias gradient");
    }
}

}  // namespace

std::size_t Network::total_hidden_width() const {
    std::size_t w = 0;
    for (std::size_t l = 0; l < n_hidden(); ++l) w += hidden_width(l);
    return w;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.weights.size() + layer.biases.size();
    return n;
}

void Network::check_consistent() const {
    if (layers.size() < 2) throw DimensionError("network needs at least one hidden layer");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.biases.size() != layer.out_dim() || layer.tags.size() != layer.out_dim())
            throw DimensionError("layer biases/tags length differs from row count");
        if (l > 0 && layer.in_dim() != layers[l - 1].out_dim())
            throw DimensionError("adjacent layer dimensions incompatible");
    }
}

Network Network::make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                          std::size_t output_dim, OutputHead head, Rng& rng) {
    if (hidden.empty()) throw DimensionError("make_mlp: at least one hidden layer required");
    Network net;
    net.head = head;
    std::size_t in = input_dim;
    for (std::size_t w : hidden) {
        net.layers.push_back({kaiming_init(w, in, rng), std::vector<double>(w, 0.0),
                              std::vector<NeuronTag>(w)});
        in = w;
    }
    net.layers.push_back({kaiming_init(output_dim, in, rng),
                          std::vector<double>(output_dim, 0.0),
                          std::vector<NeuronTag>(output_dim)});
    net.check_consistent();
    return net;
}

Matrix kaiming_init(std::size_t n_out, std::size_t n_in, Rng& rng) {
    if (n_out == 0 || n_in == 0) throw DimensionError("kaiming_init: zero dimension");
    Matrix m(n_out, n_in);
    const double stddev = std::sqrt(2.0 / static_cast<double>(n_in));
    std::normal_distribution<double> dist(0.0, stddev);
    for (double& v : m.values()) v = dist(rng);
    return m;
}

std::vector<double> kaiming_vector(std::size_t n, std::size_t fan_in, Rng& rng) {
    if (n == 0 || fan_in == 0) throw DimensionError("kaiming_vector: zero dimension");
    std::vector<double> out(n);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (double& v : out) v = dist(rng);
    return out;
}

ForwardTrace forward(const Network& net, const Matrix& X) {
    if (X.cols() != net.input_dim())
        throw DimensionError("forward: input width differs from network input dimension");
    ForwardTrace trace;
    trace.input = X;
    const Matrix* h = &trace.input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        Matrix u = matmul_bt(*h, layer.weights);
        for (std::size_t i = 0; i < u.rows(); ++i) {
            double* row = u.row(i);
            for (std::size_t j = 0; j < u.cols(); ++j) row[j] += layer.biases[j];
        }
        Matrix a = u;
        if (l + 1 < net.layers.size()) {  // hidden: ReLU; last layer: head is identity/logits
            for (double& v : a.values()) v = v > 0.0 ? v : 0.0;
        }
        trace.pre.push_back(std::move(u));
        trace.act.push_back(std::move(a));
        h = &trace.act.back();
    }
    return trace;
}

double loss_mse(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) throw DimensionError("loss_mse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.values()[i] - target.values()[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

double loss_softmax_ce(const Matrix& logits, const std::vector<int>& labels) {
    if (logits.rows() != labels.size())
        throw DimensionError("loss_softmax_ce: batch size differs from label count");
    double s = 0.0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= logits.cols())
            throw InputError("loss_softmax_ce: label out of range");
        const double* row = logits.row(i);
        double mx = row[0];
        for (std::size_t j = 1; j < logits.cols(); ++j) mx = std::max(mx, row[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) denom += std::exp(row[j] - mx);
        s += std::log(denom) - (row[static_cast<std::size_t>(y)] - mx);
    }
    return s / static_cast<double>(logits.rows());
}

double batch_loss(const Matrix& output, const Batch& batch, LossKind kind) {
    return kind == LossKind::Mse ? loss_mse(output, batch.targets)
                                 : loss_softmax_ce(output, batch.labels);
}

GradientSet backward(const Network& net, const ForwardTrace& trace, const Batch& batch,
                     LossKind kind) {
    const std::size_t k = net.layers.size();
    if (trace.pre.size() != k || trace.act.size() != k)
        throw DimensionError("backward: trace does not match network depth");
    for (std::size_t l = 0; l < k; ++l)
        if (trace.pre[l].cols() != net.layers[l].out_dim())
            throw DimensionError("backward: trace widths do not match network");
    const std::size_t B = trace.input.rows();

    GradientSet grads;
    grads.layers.resize(k);
    grads.delta.resize(k);

    // Output delta = dL/du_last under the batch-mean loss.
    const Matrix& out = trace.output();
    Matrix delta(out.rows(), out.cols());
    if (kind == LossKind::Mse) {
        if (!out.same_shape(batch.targets)) throw DimensionError("backward: target shape mismatch");
        const double scale = 2.0 / static_cast<double>(out.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            delta.values()[i] = scale * (out.values()[i] - batch.targets.values()[i]);
    } else {
        if (out.rows() != batch.labels.size())
            throw DimensionError("backward: label count mismatch");
        const double scale = 1.0 / static_cast<double>(B);
        for (std::size_t i = 0; i < out.rows(); ++i) {
            const double* row = out.row(i);
            double mx = row[0];
            for (std::size_t j = 1; j < out.cols(); ++j) mx = std::max(mx, row[j]);
            double denom = 0.0;
            for (std::size_t j = 0; j < out.cols(); ++j) denom += std::exp(row[j] - mx);
            for (std::size_t j = 0; j < out.cols(); ++j)
                delta(i, j) = scale * std::exp(row[j] - mx) / denom;
            delta(i, static_cast<std::size_t>(batch.labels[i])) -= scale;
        }
    }

    for (std::size_t l = k; l-- > 0;) {
        const Matrix& h_prev = (l == 0) ? trace.input : trace.act[l - 1];
        TensorPair g;
        g.weights = matmul_at(delta, h_prev);  // (n_out x B)^T form: delta^T * h_prev
        g.biases.assign(net.layers[l].out_dim(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i)
            for (std::size_t j = 0; j < delta.cols(); ++j) g.biases[j] += delta(i, j);
        grads.layers[l] = std::move(g);
        grads.delta[l] = delta;
        if (l > 0) {
            Matrix next = matmul(delta, net.layers[l].weights);  // B x n_{l-1}
            const Matrix& u_prev = trace.pre[l - 1];
            for (std::size_t i = 0; i < next.size(); ++i)
                if (u_prev.values()[i] <= 0.0) next.values()[i] = 0.0;  // ReLU' at 0 is 0
            delta = std::move(next);
        }
    }
    return grads;
}

AdamState AdamState::for_network(const Network& net) {
    AdamState s;
    for (const auto& layer : net.layers) {
        s.m.push_back({Matrix(layer.out_dim(), layer.in_dim()),
                       std::vector<double>(layer.out_dim(), 0.0)});
        s.v.push_back({Matrix(layer.out_dim(), layer.in_dim()),
                       std::vector<double>(layer.out_dim(), 0.0)});
    }
    return s;
}

void AdamState::resize_to(const Network& net) {
    auto resize_tensor = [](TensorPair& t, std::size_t rows, std::size_t cols) {
        Matrix w(rows, cols);
        const std::size_t rc = std::min(rows, t.weights.rows());
        const std::size_t cc = std::min(cols, t.weights.cols());
        for (std::size_t i = 0; i < rc; ++i)
            for (std::size_t j = 0; j < cc; ++j) w(i, j) = t.weights(i, j);
        t.weights = std::move(w);
        t.biases.resize(rows, 0.0);
    };
    m.resize(net.layers.size());
    v.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        resize_tensor(m[l], net.layers[l].out_dim(), net.layers[l].in_dim());
        resize_tensor(v[l], net.layers[l].out_dim(), net.layers[l].in_dim());
    }
}

void adam_step(Network& net, const GradientSet& grads, AdamState& state, double lr) {
    if (lr <= 0.0) throw InputError("adam_step: learning rate must be positive");
    if (grads.layers.size() != net.layers.size() || state.m.size() != net.layers.size())
        throw DimensionError("adam_step: gradient/state depth mismatch");
    check_finite_grads(grads);

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(kBeta1, t);
    const double bc2 = 1.0 - std::pow(kBeta2, t);

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        const auto& g = grads.layers[l];
        if (!g.weights.same_shape(layer.weights))
            throw DimensionError("adam_step: gradient shape mismatch");
        auto& mw = state.m[l].weights.values();
        auto& vw = state.v[l].weights.values();
        auto& w = layer.weights.values();
        const auto& gw = g.weights.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            mw[i] = kBeta1 * mw[i] + (1.0 - kBeta1) * gw[i];
            vw[i] = kBeta2 * vw[i] + (1.0 - kBeta2) * gw[i] * gw[i];
            w[i] -= lr * (mw[i] / bc1) / (std::sqrt(vw[i] / bc2) + kEps);
        }
        auto& mb = state.m[l].biases;
        auto& vb = state.v[l].biases;
        for (std::size_t i = 0; i < layer.biases.size(); ++i) {
            mb[i] = kBeta1 * mb[i] + (1.0 - kBeta1) * g.biases[i];
            vb[i] = kBeta2 * vb[i] + (1.0 - kBeta2) * g.biases[i] * g.biases[i];
            layer.biases[i] -= lr * (mb[i] / bc1) / (std::sqrt(vb[i] / bc2) + kEps);
        }
    }
}

std::vector<EpochMetrics> train(Network& net, AdamState& state, const Dataset& data,
                                std::size_t epochs, std::size_t batch_size, double lr,
                                LossKind kind, Rng& shuffle_rng) {
    if (data.size() == 0) throw InputError("train: empty dataset");
    if (batch_size == 0) throw InputError("train: batch_size must be >= 1");
    std::vector<EpochMetrics> metrics;
    for (std::size_t e = 0; e < epochs; ++e) {
        double loss_sum = 0.0;
        std::size_t correct = 0, seen = 0;
        for (const Batch& b : batches(data, batch_size, shuffle_rng)) {
            ForwardTrace trace = forward(net, b.inputs);
            loss_sum += batch_loss(trace.output(), b, kind) * static_cast<double>(b.size());
            if (kind == LossKind::SoftmaxCe) {
                const Matrix& out = trace.output();
                for (std::size_t i = 0; i < out.rows(); ++i) {
                    std::size_t arg = 0;
                    for (std::size_t j = 1; j < out.cols(); ++j)
                        if (out(i, j) > out(i, arg)) arg = j;
                    if (static_cast<int>(arg) == b.labels[i]) ++correct;
                }
            }
            seen += b.size();
            GradientSet grads = backward(net, trace, b, kind);
            adam_step(net, grads, state, lr);
        }
        EpochMetrics em;
        em.loss = loss_sum / static_cast<double>(seen);
        if (kind == LossKind::SoftmaxCe)
            em.accuracy = static_cast<double>(correct) / static_cast<double>(seen);
        metrics.push_back(em);
    }
    return metrics;
}

LossKind loss_for_task(Task task) {
    return task == Task::Reconstruction ? LossKind::Mse : LossKind::SoftmaxCe;
}

}  // namespace neurogrow
