#pragma once

#include <string>
#include <vector>

#include "neurogrow/diagnostics.hpp"
#include "neurogrow/growth.hpp"

namespace neurogrow {

struct ExperimentConfig {
    std::string dataset = "blobs";  // mnist | fmnist | blobs
    Task task = Task::Classification;
    std::vector<std::size_t> hidden_widths = {16};
    std::size_t n_stages = 7;
    double growth_fraction = 0.3;
    ExtenderKind extender = ExtenderKind::Swe;
    DistributorKind distributor = DistributorKind::SingleLayer;
    double lr = 1e-3;
    std::size_t batch_size = 128;
    std::size_t max_epochs_per_stage = 100;
    std::size_t early_stop_patience = 5;
    std::size_t probes_per_layer = 0;   // 0 = auto: max(stage budget, 8)
    std::size_t adjust_batch_size = 0;  // 0 = full training set
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string out_dir = "out";
    std::string data_dir;  // empty: use NEUROGROW_DATA
    double val_fraction = 0.1;

    // Inactivity-study settings.
    std::vector<ExtenderKind> study_extenders = {
        ExtenderKind::Kaiming, ExtenderKind::Frobenius, ExtenderKind::FireflyLite,
        ExtenderKind::Swe};
    std::size_t study_extra_epochs = 5;

    // Synthetic-dataset settings (dataset = blobs).
    std::size_t blobs_classes = 4;
    std::size_t blobs_per_class = 64;
    std::size_t blobs_dim = 8;
    double blobs_spread = 0.05;

    void validate() const;  // throws ConfigError
};

/// Key = value config file (one pair per line, '#' comments, comma lists).
ExperimentConfig load_config(const std::string& path);

std::string extender_name(ExtenderKind k);
std::string distributor_name(DistributorKind k);
ExtenderKind parse_extender(const std::string& s);
DistributorKind parse_distributor(const std::string& s);

struct StageRecord {
    int stage = 0;
    std::vector<std::size_t> widths_before;
    std::vector<std::size_t> widths_after;
    ExpansionPlan plan;
    std::size_t epochs_trained = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double test_loss = 0.0;
    double train_accuracy = -1.0;  // < 0 when not classification
    double test_accuracy = -1.0;
    InactivityReport inactivity;   // among this stage's insertions
    double seconds = 0.0;
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<StageRecord> stages;
    Network final_net;
};

struct RunReport {
    std::string config_hash;
    std::vector<SeedRun> runs;
};

struct InactivityRow {
    std::string extender;
    std::uint64_t seed = 0;
    std::size_t new_total = 0;
    std::size_t inactive_new = 0;
    double pct_inactive_new = 0.0;
    double final_train_loss = 0.0;
};

struct InactivityStudy {
    std::string config_hash;
    std::vector<InactivityRow> rows;
};

/// Full growth loop: per seed, alternate early-stopped Adam training and
/// distributor/extender expansion for n_stages, then one final training
/// round. Deterministic per (config, seed).
RunReport run_growth_experiment(const ExperimentConfig& config);

/// Train a single-hidden-layer net to convergence, double its width with each
/// study extender, train study_extra_epochs more, report inactive % among the
/// new neurons.
InactivityStudy run_inactivity_study(const ExperimentConfig& config);

/// NGROW1 binary container; load(save(net)) is bit-exact.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

/// stages.csv + summary.json under out_dir.
void emit_reports(const RunReport& report, const std::string& out_dir);
/// inactivity.csv under out_dir.
void emit_inactivity(const InactivityStudy& study, const std::string& out_dir);

/// Resolve and load the configured dataset (train or test portion).
Dataset load_experiment_dataset(const ExperimentConfig& config, bool test);

std::string config_hash(const ExperimentConfig& config);

}  // namespace neurogrow
