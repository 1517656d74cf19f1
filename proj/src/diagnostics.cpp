#include "neurogrow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace neurogrow {

namespace {

double pct(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

std::size_t InactivityReport::total_neurons() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.total_neurons;
    return n;
}

std::size_t InactivityReport::inactive_total() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.inactive_total;
    return n;
}

std::size_t InactivityReport::new_total() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.new_total;
    return n;
}

std::size_t InactivityReport::inactive_new() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.inactive_new;
    return n;
}

double InactivityReport::pct_inactive_total() const {
    return pct(inactive_total(), total_neurons());
}

double InactivityReport::pct_inactive_new() const {
    return pct(inactive_new(), new_total());
}

InactivityReport measure_inactivity(const Network& net, const Matrix& X,
                                    std::optional<int> stage_filter,
                                    std::size_t batch_size) {
    if (X.rows() == 0) throw InputError("measure_inactivity: empty dataset");
    const std::size_t k = net.n_hidden();
    std::vector<std::vector<char>> active(k);
    for (std::size_t l = 0; l < k; ++l) active[l].assign(net.hidden_width(l), 0);

    for (std::size_t start = 0; start < X.rows(); start += batch_size) {
        const std::size_t stop = std::min(start + batch_size, X.rows());
        Matrix chunk(stop - start, X.cols());
        std::copy(X.row(start), X.row(stop - 1) + X.cols(), chunk.data());
        ForwardTrace trace = forward(net, chunk);
        for (std::size_t l = 0; l < k; ++l) {
            const Matrix& h = trace.act[l];
            for (std::size_t i = 0; i < h.rows(); ++i)
                for (std::size_t j = 0; j < h.cols(); ++j)
                    if (h(i, j) > 0.0) active[l][j] = 1;
        }
    }

    InactivityReport report;
    for (std::size_t l = 0; l < k; ++l) {
        LayerInactivity li;
        li.total_neurons = net.hidden_width(l);
        for (std::size_t j = 0; j < li.total_neurons; ++j) {
            const bool inactive = !active[l][j];
            if (inactive) ++li.inactive_total;
            if (stage_filter && net.layers[l].tags[j].birth_stage == *stage_filter) {
                ++li.new_total;
                if (inactive) ++li.inactive_new;
            }
        }
        report.layers.push_back(li);
    }
    return report;
}

EvalResult evaluate(const Network& net, const Dataset& data, Task task,
                    std::size_t batch_size) {
    if (data.size() == 0) throw InputError("evaluate: empty dataset");
    const LossKind kind = loss_for_task(task);
    double loss_sum = 0.0;
    std::size_t correct = 0;

    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < data.size(); start += batch_size) {
        const std::size_t stop = std::min(start + batch_size, data.size());
        idx.resize(stop - start);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
        Dataset sub = subset(data, idx);
        Batch b{std::move(sub.X), std::move(sub.targets), std::move(sub.labels)};
        ForwardTrace trace = forward(net, b.inputs);
        loss_sum += batch_loss(trace.output(), b, kind) * static_cast<double>(b.size());
        if (task == Task::Classification) {
            const Matrix& out = trace.output();
            for (std::size_t i = 0; i < out.rows(); ++i) {
                std::size_t arg = 0;
                for (std::size_t j = 1; j < out.cols(); ++j)
                    if (out(i, j) > out(i, arg)) arg = j;
                if (static_cast<int>(arg) == b.labels[i]) ++correct;
            }
        }
    }

    EvalResult res;
    res.sample_count = data.size();
    res.loss = loss_sum / static_cast<double>(data.size());
    if (task == Task::Classification)
        res.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return res;
}

double grad_check(const Network& net, const Batch& batch, LossKind kind, double step) {
    if (net.parameter_count() > 100000)
        throw InputError("grad_check: network too large to enumerate (> 1e5 parameters)");

    ForwardTrace trace = forward(net, batch.inputs);
    GradientSet grads = backward(net, trace, batch, kind);

    Network probe = net;
    auto loss_at = [&]() {
        return batch_loss(forward(probe, batch.inputs).output(), batch, kind);
    };
    auto rel_error = [](double fd, double an) {
        const double diff = std::abs(fd - an);
        if (diff <= 1e-8) return 0.0;  // absolute tolerance near zero
        return diff / std::max(std::abs(fd), std::abs(an));
    };

    double max_err = 0.0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& w = probe.layers[l].weights.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double saved = w[i];
            w[i] = saved + step;
            const double up = loss_at();
            w[i] = saved - step;
            const double down = loss_at();
            w[i] = saved;
            max_err = std::max(max_err, rel_error((up - down) / (2.0 * step),
                                                  grads.layers[l].weights.values()[i]));
        }
        auto& b = probe.layers[l].biases;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double saved = b[i];
            b[i] = saved + step;
            const double up = loss_at();
            b[i] = saved - step;
            const double down = loss_at();
            b[i] = saved;
            max_err = std::max(max_err,
                               rel_error((up - down) / (2.0 * step), grads.layers[l].biases[i]));
        }
    }
    return max_err;
}

}  // namespace neurogrow
