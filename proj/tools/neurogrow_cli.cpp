#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "neurogrow/diagnostics.hpp"
#include "neurogrow/harness.hpp"

using namespace neurogrow;

namespace {

ExperimentConfig make_config(const std::string& config_path, std::uint64_t seed_override,
                             const std::string& out_override,
                             const std::string& data_dir_override) {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed_override != 0) cfg.seeds = {seed_override};
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!data_dir_override.empty()) cfg.data_dir = data_dir_override;
    cfg.validate();
    return cfg;
}

int run_gradcheck(std::uint64_t seed, std::size_t n_nets) {
    Rng rng(seed ? seed : 7);
    double worst = 0.0;
    std::uniform_int_distribution<std::size_t> widths(2, 8);
    std::uniform_int_distribution<std::size_t> depths(1, 3);
    std::uniform_int_distribution<std::size_t> rows(1, 4);
    std::normal_distribution<double> values(0.0, 1.0);
    for (std::size_t i = 0; i < n_nets; ++i) {
        const LossKind kind = i % 2 ? LossKind::SoftmaxCe : LossKind::Mse;
        std::vector<std::size_t> hidden(depths(rng));
        for (auto& w : hidden) w = widths(rng);
        const std::size_t in = widths(rng), out = widths(rng);
        Network net = Network::make_mlp(
            in, hidden, out,
            kind == LossKind::Mse ? OutputHead::Identity : OutputHead::Logits, rng);
        for (auto& layer : net.layers)  // keep preactivations off the ReLU kink
            for (double& bias : layer.biases) bias = 0.1 * values(rng);
        Batch b;
        b.inputs = Matrix(rows(rng), in);
        for (double& v : b.inputs.values()) v = values(rng);
        if (kind == LossKind::Mse) {
            b.targets = Matrix(b.inputs.rows(), out);
            for (double& v : b.targets.values()) v = values(rng);
        } else {
            std::uniform_int_distribution<int> lab(0, static_cast<int>(out) - 1);
            for (std::size_t r = 0; r < b.inputs.rows(); ++r) b.labels.push_back(lab(rng));
        }
        worst = std::max(worst, grad_check(net, b, kind));
    }
    std::printf("gradcheck: max relative error %.3e over %zu random networks\n", worst,
                n_nets);
    return worst < 1e-5 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neurogrow: grow ReLU MLPs during training"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global options (--config, --seed, ...) after the subcommand

    std::string config_path, out_dir, data_dir;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "experiment config file (key = value)");
    app.add_option("--seed", seed, "override the config's seed list with one seed");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--data-dir", data_dir, "dataset directory (or env NEUROGROW_DATA)");

    auto* grow = app.add_subcommand("grow", "run a growth experiment");
    auto* inactivity = app.add_subcommand("inactivity", "run the inactivity study");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved network on a dataset");
    std::string net_path, eval_dataset = "mnist", eval_task = "classification";
    eval_cmd->add_option("--net", net_path, "NGROW1 network file")->required();
    eval_cmd->add_option("--dataset", eval_dataset, "mnist | fmnist | blobs");
    eval_cmd->add_option("--task", eval_task, "classification | reconstruction");
    eval_cmd->add_flag("--train-split", "evaluate on the training split instead of test");

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    std::size_t gradcheck_nets = 50;
    gradcheck->add_option("--nets", gradcheck_nets, "number of random networks");

    auto* audit = app.add_subcommand("audit", "inactive-neuron report for a saved network");
    std::string audit_net, audit_dataset = "mnist";
    int audit_stage = -1;
    audit->add_option("--net", audit_net, "NGROW1 network file")->required();
    audit->add_option("--dataset", audit_dataset, "mnist | fmnist | blobs");
    audit->add_option("--stage", audit_stage, "restrict 'new' counts to this birth stage");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (grow->parsed()) {
            ExperimentConfig cfg = make_config(config_path, seed, out_dir, data_dir);
            RunReport report = run_growth_experiment(cfg);
            emit_reports(report, cfg.out_dir);
            for (const auto& run : report.runs)
                save_network(run.final_net, cfg.out_dir + "/final_seed" +
                                                std::to_string(run.seed) + ".ngrow");
            std::printf("wrote %s/stages.csv, summary.json, and final_seed*.ngrow\n",
                        cfg.out_dir.c_str());
        } else if (inactivity->parsed()) {
            ExperimentConfig cfg = make_config(config_path, seed, out_dir, data_dir);
            InactivityStudy study = run_inactivity_study(cfg);
            emit_inactivity(study, cfg.out_dir);
            std::printf("wrote %s/inactivity.csv\n", cfg.out_dir.c_str());
        } else if (eval_cmd->parsed()) {
            ExperimentConfig cfg = make_config(config_path, seed, out_dir, data_dir);
            cfg.dataset = eval_dataset;
            cfg.task = eval_task == "reconstruction" ? Task::Reconstruction
                                                     : Task::Classification;
            Network net = load_network(net_path);
            Dataset ds =
                load_experiment_dataset(cfg, !eval_cmd->get_option("--train-split")->count());
            EvalResult res = evaluate(net, ds, cfg.task);
            std::printf("samples %zu loss %.6g", res.sample_count, res.loss);
            if (res.accuracy) std::printf(" accuracy %.4f", *res.accuracy);
            std::printf("\n");
        } else if (gradcheck->parsed()) {
            return run_gradcheck(seed, gradcheck_nets);
        } else if (audit->parsed()) {
            ExperimentConfig cfg = make_config(config_path, seed, out_dir, data_dir);
            cfg.dataset = audit_dataset;
            Network net = load_network(audit_net);
            Dataset ds = load_experiment_dataset(cfg, false);
            std::optional<int> filter;
            if (audit_stage >= 0) filter = audit_stage;
            InactivityReport rep = measure_inactivity(net, ds.X, filter);
            for (std::size_t l = 0; l < rep.layers.size(); ++l) {
                const auto& li = rep.layers[l];
                std::printf("layer %zu: %zu/%zu inactive", l, li.inactive_total,
                            li.total_neurons);
                if (filter)
                    std::printf(" (stage %d: %zu/%zu inactive)", *filter, li.inactive_new,
                                li.new_total);
                std::printf("\n");
            }
            std::printf("total inactive: %.1f%%\n", rep.pct_inactive_total());
            if (filter) std::printf("inactive among stage-%d neurons: %.1f%%\n", *filter,
                                    rep.pct_inactive_new());
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
