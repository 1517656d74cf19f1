#include "neurogrow/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace neurogrow {

namespace {

void require_hidden(const Network& net, std::size_t layer_index, const char* who) {
    if (layer_index >= net.n_hidden())
        throw InputError(std::string(who) + ": layer index does not address a hidden layer");
}

void append_rows(Matrix& dst, const Matrix& rows) {
    Matrix out(dst.rows() + rows.rows(), dst.cols());
    std::copy(dst.values().begin(), dst.values().end(), out.values().begin());
    std::copy(rows.values().begin(), rows.values().end(),
              out.values().begin() + static_cast<long>(dst.size()));
    dst = std::move(out);
}

void append_cols(Matrix& dst, const Matrix& cols) {
    Matrix out(dst.rows(), dst.cols() + cols.cols());
    for (std::size_t i = 0; i < dst.rows(); ++i) {
        for (std::size_t j = 0; j < dst.cols(); ++j) out(i, j) = dst(i, j);
        for (std::size_t j = 0; j < cols.cols(); ++j) out(i, dst.cols() + j) = cols(i, j);
    }
    dst = std::move(out);
}

void scale_matrix(Matrix& m, double s) {
    for (double& v : m.values()) v *= s;
}

/// Grow layer `layer_index` by m rows (given incoming weights) and the next
/// layer by m columns (given outgoing weights, n_next x m).
void insert_neurons(Network& net, std::size_t layer_index, const Matrix& incoming,
                    const Matrix& outgoing, int stage) {
    auto& layer = net.layers[layer_index];
    append_rows(layer.weights, incoming);
    layer.biases.resize(layer.biases.size() + incoming.rows(), 0.0);
    layer.tags.resize(layer.tags.size() + incoming.rows(), NeuronTag{stage});
    append_cols(net.layers[layer_index + 1].weights, outgoing);
    net.check_consistent();
}

}  // namespace

std::size_t ExpansionPlan::total() const {
    return std::accumulate(per_layer_counts.begin(), per_layer_counts.end(), std::size_t{0});
}

CouplingSet CouplingSet::zeros(std::size_t m, std::size_t n_old, std::size_t n_in) {
    CouplingSet c;
    c.w.assign(m, Matrix(n_old, n_in));
    c.b = Matrix(m, n_old);
    return c;
}

std::size_t ProbeStats::negative_votes() const {
    return static_cast<std::size_t>(
        std::count_if(gradients.begin(), gradients.end(), [](double g) { return g < 0.0; }));
}

void swe_insert(Network& net, std::size_t layer_index, std::size_t m, int stage, Rng& rng) {
    require_hidden(net, layer_index, "swe_insert");
    if (m == 0) return;
    const std::size_t n_in = net.layers[layer_index].in_dim();
    const std::size_t n_next = net.layers[layer_index + 1].out_dim();
    insert_neurons(net, layer_index, kaiming_init(m, n_in, rng), Matrix(n_next, m), stage);
}

Network swe_effective(const Network& net, std::size_t layer_index, std::size_t m,
                      const CouplingSet& couplings) {
    Network eff = net;
    auto& layer = eff.layers[layer_index];
    const std::size_t n_out = layer.out_dim();
    if (m > n_out) throw DimensionError("swe_effective: m exceeds layer width");
    const std::size_t n_old = n_out - m;
    if (couplings.w.size() != m || couplings.b.rows() != m || couplings.b.cols() != n_old)
        throw DimensionError("swe_effective: coupling shapes do not match layer");

    for (std::size_t j = 0; j < m; ++j) {
        const Matrix& cw = couplings.w[j];
        if (cw.rows() != n_old || cw.cols() != layer.in_dim())
            throw DimensionError("swe_effective: coupling matrix shape mismatch");
        double* new_row = layer.weights.row(n_old + j);
        for (std::size_t i = 0; i < n_old; ++i) {
            const double* ci = cw.row(i);
            double* old_row = layer.weights.row(i);
            for (std::size_t p = 0; p < cw.cols(); ++p) {
                new_row[p] += ci[p];
                old_row[p] -= ci[p];
            }
            layer.biases[n_old + j] += couplings.b(j, i);
            layer.biases[i] -= couplings.b(j, i);
        }
    }
    return eff;
}

CouplingGrad swe_coupling_grad(const Network& net, std::size_t layer_index, std::size_t m,
                               const CouplingSet& couplings, const Batch& batch,
                               LossKind kind, GradientSet* effective_grads) {
    if (batch.size() == 0) throw InputError("swe_coupling_grad: empty batch");
    Network eff = swe_effective(net, layer_index, m, couplings);
    ForwardTrace trace = forward(eff, batch.inputs);
    GradientSet grads = backward(eff, trace, batch, kind);

    const auto& g = grads.layers[layer_index];
    const std::size_t n_old = net.layers[layer_index].out_dim() - m;
    CouplingGrad cg;
    cg.w.assign(m, Matrix(n_old, net.layers[layer_index].in_dim()));
    cg.b = Matrix(m, n_old);
    // Chain rule through the effective parameterization: each coupling enters
    // the new neuron with +1 and its donor with -1.
    for (std::size_t j = 0; j < m; ++j) {
        const double* g_new = g.weights.row(n_old + j);
        for (std::size_t i = 0; i < n_old; ++i) {
            const double* g_old = g.weights.row(i);
            double* out = cg.w[j].row(i);
            for (std::size_t p = 0; p < cg.w[j].cols(); ++p) out[p] = g_new[p] - g_old[p];
            cg.b(j, i) = g.biases[n_old + j] - g.biases[i];
        }
    }
    if (effective_grads) *effective_grads = std::move(grads);
    return cg;
}

void swe_merge(Network& net, std::size_t layer_index, std::size_t m,
               const CouplingSet& couplings) {
    Network eff = swe_effective(net, layer_index, m, couplings);
    net.layers[layer_index].weights = std::move(eff.layers[layer_index].weights);
    net.layers[layer_index].biases = std::move(eff.layers[layer_index].biases);
}

void swe_extend(Network& net, std::size_t layer_index, std::size_t m,
                const Batch& adjust_batch, LossKind kind, double lr, int stage, Rng& rng,
                GrowthCounters* counters) {
    require_hidden(net, layer_index, "swe_extend");
    if (m == 0) return;
    if (adjust_batch.size() == 0) throw InputError("swe_extend: empty adjustment batch");

    swe_insert(net, layer_index, m, stage, rng);
    const std::size_t n_old = net.layers[layer_index].out_dim() - m;
    CouplingSet couplings =
        CouplingSet::zeros(m, n_old, net.layers[layer_index].in_dim());

    GradientSet eff_grads;
    CouplingGrad cg =
        swe_coupling_grad(net, layer_index, m, couplings, adjust_batch, kind, &eff_grads);
    if (counters) ++counters->adjust_passes;

    // One plain gradient step on the couplings and the next layer only.
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < couplings.w[j].size(); ++i)
            couplings.w[j].values()[i] -= lr * cg.w[j].values()[i];
    for (std::size_t i = 0; i < couplings.b.size(); ++i)
        couplings.b.values()[i] -= lr * cg.b.values()[i];

    auto& next = net.layers[layer_index + 1];
    const auto& gnext = eff_grads.layers[layer_index + 1];
    for (std::size_t i = 0; i < next.weights.size(); ++i)
        next.weights.values()[i] -= lr * gnext.weights.values()[i];
    for (std::size_t i = 0; i < next.biases.size(); ++i)
        next.biases[i] -= lr * gnext.biases[i];

    swe_merge(net, layer_index, m, couplings);
}

void kaiming_extend(Network& net, std::size_t layer_index, std::size_t m, int stage,
                    Rng& rng) {
    require_hidden(net, layer_index, "kaiming_extend");
    if (m == 0) return;
    const std::size_t n_in = net.layers[layer_index].in_dim();
    const std::size_t n_next = net.layers[layer_index + 1].out_dim();
    const std::size_t grown_width = net.layers[layer_index].out_dim() + m;
    Matrix incoming = kaiming_init(m, n_in, rng);
    Matrix outgoing(n_next, m);
    // Outgoing entries use the next layer's post-expansion fan-in.
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(grown_width)));
    for (double& v : outgoing.values()) v = dist(rng);
    insert_neurons(net, layer_index, incoming, outgoing, stage);
}

void frobenius_extend(Network& net, std::size_t layer_index, std::size_t m, int stage,
                      Rng& rng) {
    require_hidden(net, layer_index, "frobenius_extend");
    if (m == 0) return;
    const double norm_in = frobenius_norm(net.layers[layer_index].weights);
    const double norm_out = frobenius_norm(net.layers[layer_index + 1].weights);
    if (norm_in == 0.0 || norm_out == 0.0)
        throw InputError("frobenius_extend: zero pre-expansion norm");
    kaiming_extend(net, layer_index, m, stage, rng);
    scale_matrix(net.layers[layer_index].weights,
                 norm_in / frobenius_norm(net.layers[layer_index].weights));
    scale_matrix(net.layers[layer_index + 1].weights,
                 norm_out / frobenius_norm(net.layers[layer_index + 1].weights));
}

void firefly_lite_extend(Network& net, std::size_t layer_index, std::size_t m,
                         const std::vector<Batch>& train_batches, LossKind kind, double lr,
                         int stage, Rng& rng, std::size_t pool_factor,
                         std::size_t candidate_epochs) {
    require_hidden(net, layer_index, "firefly_lite_extend");
    if (m == 0) throw InputError("firefly_lite_extend: m must be >= 1");
    if (pool_factor == 0 || pool_factor * m < m)
        throw InputError("firefly_lite_extend: candidate pool smaller than m");
    if (train_batches.empty()) throw InputError("firefly_lite_extend: no training batches");

    const std::size_t pool = pool_factor * m;
    const std::size_t n_old = net.layers[layer_index].out_dim();
    swe_insert(net, layer_index, pool, stage, rng);

    auto& layer = net.layers[layer_index];
    auto& next = net.layers[layer_index + 1];

    // Candidate-only training: base network frozen.
    for (std::size_t e = 0; e < candidate_epochs; ++e) {
        for (const Batch& b : train_batches) {
            ForwardTrace trace = forward(net, b.inputs);
            GradientSet grads = backward(net, trace, b, kind);
            const auto& gl = grads.layers[layer_index];
            for (std::size_t j = n_old; j < layer.out_dim(); ++j) {
                double* w = layer.weights.row(j);
                const double* g = gl.weights.row(j);
                for (std::size_t p = 0; p < layer.in_dim(); ++p) w[p] -= lr * g[p];
                layer.biases[j] -= lr * gl.biases[j];
            }
            const auto& gn = grads.layers[layer_index + 1];
            for (std::size_t i = 0; i < next.out_dim(); ++i)
                for (std::size_t j = n_old; j < layer.out_dim(); ++j)
                    next.weights(i, j) -= lr * gn.weights(i, j);
        }
    }

    // Score each candidate by |dL/dz| of scaling its preactivation.
    std::vector<double> score(pool, 0.0);
    for (const Batch& b : train_batches) {
        ForwardTrace trace = forward(net, b.inputs);
        GradientSet grads = backward(net, trace, b, kind);
        const Matrix& u = trace.pre[layer_index];
        const Matrix& d = grads.delta[layer_index];
        for (std::size_t j = 0; j < pool; ++j) {
            double g = 0.0;
            for (std::size_t r = 0; r < u.rows(); ++r)
                g += d(r, n_old + j) * u(r, n_old + j);
            score[j] += g;
        }
    }

    std::vector<std::size_t> order(pool);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(score[a]) > std::abs(score[b]);
    });
    std::vector<bool> keep(pool, false);
    for (std::size_t r = 0; r < m; ++r) keep[order[r]] = true;

    std::vector<std::size_t> kept_rows;
    for (std::size_t i = 0; i < n_old; ++i) kept_rows.push_back(i);
    for (std::size_t j = 0; j < pool; ++j)
        if (keep[j]) kept_rows.push_back(n_old + j);

    Matrix w(kept_rows.size(), layer.in_dim());
    std::vector<double> biases(kept_rows.size());
    std::vector<NeuronTag> tags(kept_rows.size());
    Matrix nw(next.out_dim(), kept_rows.size());
    for (std::size_t r = 0; r < kept_rows.size(); ++r) {
        const std::size_t src = kept_rows[r];
        std::copy(layer.weights.row(src), layer.weights.row(src) + layer.in_dim(), w.row(r));
        biases[r] = layer.biases[src];
        tags[r] = layer.tags[src];
        for (std::size_t i = 0; i < next.out_dim(); ++i) nw(i, r) = next.weights(i, src);
    }
    layer.weights = std::move(w);
    layer.biases = std::move(biases);
    layer.tags = std::move(tags);
    next.weights = std::move(nw);
    net.check_consistent();
}

ProbeStats probe_gradients(const Network& net, std::size_t layer_index,
                           std::size_t probes_per_layer, const Batch& eval_batch,
                           LossKind kind, Rng& rng) {
    require_hidden(net, layer_index, "probe_gradients");
    if (eval_batch.size() == 0) throw InputError("probe_gradients: empty batch");

    ForwardTrace trace = forward(net, eval_batch.inputs);
    GradientSet grads = backward(net, trace, eval_batch, kind);
    const Matrix& h_prev = layer_index == 0 ? trace.input : trace.act[layer_index - 1];
    const Matrix& delta_next = grads.delta[layer_index + 1];
    const std::size_t fan_in = net.layers[layer_index].in_dim();
    const std::size_t width = net.layers[layer_index].out_dim();
    const std::size_t n_next = net.layers[layer_index + 1].out_dim();

    ProbeStats stats;
    stats.layer_index = layer_index;
    stats.gradients.reserve(probes_per_layer);
    for (std::size_t p = 0; p < probes_per_layer; ++p) {
        const std::vector<double> w = kaiming_vector(fan_in, fan_in, rng);
        const std::vector<double> v = kaiming_vector(n_next, width, rng);
        double g = 0.0;
        for (std::size_t r = 0; r < h_prev.rows(); ++r) {
            const double* hr = h_prev.row(r);
            double u = 0.0;  // probe bias is 0
            for (std::size_t q = 0; q < fan_in; ++q) u += w[q] * hr[q];
            if (u <= 0.0) continue;  // ReLU' is 0, phi'(u)*u vanishes
            double vd = 0.0;
            for (std::size_t q = 0; q < n_next; ++q) vd += v[q] * delta_next(r, q);
            g += vd * u;
        }
        if (!std::isfinite(g)) throw NumericalError("probe_gradients: non-finite gradient");
        stats.gradients.push_back(g);
    }
    return stats;
}

ExpansionPlan svod_allocate(const Network& net, std::size_t total_m,
                            std::size_t probes_per_layer, const Batch& eval_batch,
                            LossKind kind, Rng& rng, int stage) {
    if (total_m == 0) throw InputError("svod_allocate: total_m must be >= 1");
    const std::size_t k = net.n_hidden();
    std::vector<double> votes(k, 0.0);
    double total_votes = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
        ProbeStats stats = probe_gradients(net, l, probes_per_layer, eval_batch, kind, rng);
        votes[l] = static_cast<double>(stats.negative_votes());
        total_votes += votes[l];
    }
    if (total_votes == 0.0) votes.assign(k, 1.0);  // uniform fallback

    ExpansionPlan plan;
    plan.stage = stage;
    plan.per_layer_counts = largest_remainder(total_m, votes);
    return plan;
}

ExpansionPlan ras_allocate(std::size_t total_m, std::size_t n_hidden_layers, Rng& rng,
                           int stage) {
    if (total_m == 0) throw InputError("ras_allocate: total_m must be >= 1");
    if (n_hidden_layers == 0) throw InputError("ras_allocate: need at least one layer");
    ExpansionPlan plan;
    plan.stage = stage;
    plan.per_layer_counts.assign(n_hidden_layers, 0);
    std::uniform_int_distribution<std::size_t> pick(0, n_hidden_layers - 1);
    for (std::size_t i = 0; i < total_m; ++i) plan.per_layer_counts[pick(rng)]++;
    return plan;
}

std::vector<std::size_t> largest_remainder(std::size_t total,
                                           const std::vector<double>& weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (weights.empty() || sum <= 0.0)
        throw InputError("largest_remainder: weights must be non-empty with positive sum");
    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double quota = static_cast<double>(total) * weights[i] / sum;
        counts[i] = static_cast<std::size_t>(std::floor(quota));
        assigned += counts[i];
        rem.emplace_back(quota - std::floor(quota), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        return a.first > b.first;  // ties keep lower index first
    });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned)
        counts[rem[r % rem.size()].second]++;
    return counts;
}

void apply_plan(Network& net, const ExpansionPlan& plan, ExtenderKind extender,
                const ExtenderContext& ctx, Rng& rng) {
    if (plan.per_layer_counts.size() != net.n_hidden())
        throw DimensionError("apply_plan: plan length differs from hidden layer count");
    for (std::size_t l = 0; l < plan.per_layer_counts.size(); ++l) {
        const std::size_t m = plan.per_layer_counts[l];
        if (m == 0) continue;
        switch (extender) {
            case ExtenderKind::Swe:
                swe_extend(net, l, m, ctx.adjust_batch, ctx.loss, ctx.lr, plan.stage, rng,
                           ctx.counters);
                break;
            case ExtenderKind::Kaiming:
                kaiming_extend(net, l, m, plan.stage, rng);
                break;
            case ExtenderKind::Frobenius:
                frobenius_extend(net, l, m, plan.stage, rng);
                break;
            case ExtenderKind::FireflyLite:
                firefly_lite_extend(net, l, m, ctx.train_batches, ctx.loss, ctx.lr,
                                    plan.stage, rng, ctx.pool_factor, ctx.candidate_epochs);
                break;
        }
    }
}

}  // namespace neurogrow
