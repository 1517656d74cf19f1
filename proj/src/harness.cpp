#include "neurogrow/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace neurogrow {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_sizes(const std::vector<std::size_t>& v, char sep = '|') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::size_t> widths_of(const Network& net) {
    std::vector<std::size_t> w;
    for (std::size_t l = 0; l < net.n_hidden(); ++l) w.push_back(net.hidden_width(l));
    return w;
}

struct Snapshot {
    Network net;
    AdamState adam;
};

/// Adam training with early stopping on validation loss; restores the best
/// snapshot. Returns the number of epochs run.
std::size_t train_early_stop(Network& net, AdamState& adam, const Dataset& train_set,
                             const Dataset& val_set, const ExperimentConfig& cfg,
                             LossKind kind, Rng& shuffle_rng) {
    double best_val = std::numeric_limits<double>::infinity();
    Snapshot best{net, adam};
    std::size_t since_best = 0;
    std::size_t epochs = 0;
    for (; epochs < cfg.max_epochs_per_stage; ++epochs) {
        train(net, adam, train_set, 1, cfg.batch_size, cfg.lr, kind, shuffle_rng);
        const double val = evaluate(net, val_set, train_set.task).loss;
        if (val < best_val) {
            best_val = val;
            best = {net, adam};
            since_best = 0;
        } else if (++since_best >= cfg.early_stop_patience) {
            ++epochs;
            break;
        }
    }
    net = std::move(best.net);
    adam = std::move(best.adam);
    return epochs;
}

std::string find_idx_pair(const std::vector<std::string>& dirs, const std::string& stem) {
    for (const auto& dir : dirs) {
        for (const char* ext : {"", ".gz"}) {
            const std::string path = dir + "/" + stem + ext;
            if (fs::exists(path)) return path;
        }
    }
    throw InputError("dataset file not found: " + stem +
                     " (searched under the configured data directory; set --data-dir or "
                     "NEUROGROW_DATA)");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (dataset != "mnist" && dataset != "fmnist" && dataset != "blobs")
        throw ConfigError("dataset must be mnist, fmnist, or blobs");
    if (hidden_widths.empty()) throw ConfigError("at least one hidden layer required");
    for (std::size_t w : hidden_widths)
        if (w == 0) throw ConfigError("hidden widths must be >= 1");
    if (growth_fraction <= 0.0) throw ConfigError("growth_fraction must be > 0");
    if (lr <= 0.0) throw ConfigError("lr must be > 0");
    if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (seeds.empty()) throw ConfigError("at least one seed required");
    if (val_fraction <= 0.0 || val_fraction >= 1.0)
        throw ConfigError("val_fraction must be in (0,1)");
    if (distributor == DistributorKind::SingleLayer && hidden_widths.size() != 1)
        throw ConfigError("distributor single_layer requires exactly one hidden layer");
    if (study_extra_epochs == 0) throw ConfigError("study_extra_epochs must be >= 1");
}

std::string extender_name(ExtenderKind k) {
    switch (k) {
        case ExtenderKind::Swe: return "swe";
        case ExtenderKind::Kaiming: return "kaiming";
        case ExtenderKind::Frobenius: return "frobenius";
        case ExtenderKind::FireflyLite: return "firefly_lite";
    }
    return "?";
}

std::string distributor_name(DistributorKind k) {
    switch (k) {
        case DistributorKind::Svod: return "svod";
        case DistributorKind::Ras: return "ras";
        case DistributorKind::SingleLayer: return "single_layer";
    }
    return "?";
}

ExtenderKind parse_extender(const std::string& s) {
    if (s == "swe") return ExtenderKind::Swe;
    if (s == "kaiming" || s == "random") return ExtenderKind::Kaiming;
    if (s == "frobenius") return ExtenderKind::Frobenius;
    if (s == "firefly" || s == "firefly_lite") return ExtenderKind::FireflyLite;
    throw ConfigError("unknown extender: " + s);
}

DistributorKind parse_distributor(const std::string& s) {
    if (s == "svod") return DistributorKind::Svod;
    if (s == "ras") return DistributorKind::Ras;
    if (s == "single" || s == "single_layer") return DistributorKind::SingleLayer;
    throw ConfigError("unknown distributor: " + s);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        try {
            if (key == "dataset") cfg.dataset = value;
            else if (key == "task")
                cfg.task = value == "reconstruction" ? Task::Reconstruction
                                                     : Task::Classification;
            else if (key == "hidden") {
                cfg.hidden_widths.clear();
                for (const auto& t : split_list(value))
                    cfg.hidden_widths.push_back(std::stoul(t));
            } else if (key == "stages") cfg.n_stages = std::stoul(value);
            else if (key == "growth_fraction") cfg.growth_fraction = std::stod(value);
            else if (key == "extender") cfg.extender = parse_extender(value);
            else if (key == "distributor") cfg.distributor = parse_distributor(value);
            else if (key == "lr") cfg.lr = std::stod(value);
            else if (key == "batch_size") cfg.batch_size = std::stoul(value);
            else if (key == "max_epochs") cfg.max_epochs_per_stage = std::stoul(value);
            else if (key == "patience") cfg.early_stop_patience = std::stoul(value);
            else if (key == "probes_per_layer")
                cfg.probes_per_layer = value == "auto" ? 0 : std::stoul(value);
            else if (key == "adjust_batch") cfg.adjust_batch_size = std::stoul(value);
            else if (key == "seeds") {
                cfg.seeds.clear();
                for (const auto& t : split_list(value)) cfg.seeds.push_back(std::stoull(t));
            } else if (key == "out") cfg.out_dir = value;
            else if (key == "data_dir") cfg.data_dir = value;
            else if (key == "val_fraction") cfg.val_fraction = std::stod(value);
            else if (key == "study_extenders") {
                cfg.study_extenders.clear();
                for (const auto& t : split_list(value))
                    cfg.study_extenders.push_back(parse_extender(t));
            } else if (key == "study_extra_epochs") cfg.study_extra_epochs = std::stoul(value);
            else if (key == "blobs_classes") cfg.blobs_classes = std::stoul(value);
            else if (key == "blobs_per_class") cfg.blobs_per_class = std::stoul(value);
            else if (key == "blobs_dim") cfg.blobs_dim = std::stoul(value);
            else if (key == "blobs_spread") cfg.blobs_spread = std::stod(value);
            else
                throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for '" +
                              key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

std::string config_hash(const ExperimentConfig& c) {
    std::string s = c.dataset + "|" + (c.task == Task::Reconstruction ? "rec" : "cls") + "|" +
                    join_sizes(c.hidden_widths, ',') + "|" + std::to_string(c.n_stages) +
                    "|" + fmt_double(c.growth_fraction) + "|" + extender_name(c.extender) +
                    "|" + distributor_name(c.distributor) + "|" + fmt_double(c.lr) + "|" +
                    std::to_string(c.batch_size) + "|" + std::to_string(c.max_epochs_per_stage) +
                    "|" + std::to_string(c.early_stop_patience) + "|" +
                    std::to_string(c.probes_per_layer) + "|" +
                    std::to_string(c.adjust_batch_size) + "|" + fmt_double(c.val_fraction);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Dataset load_experiment_dataset(const ExperimentConfig& config, bool test) {
    if (config.dataset == "blobs") {
        // Train and test must share the same class centers, so generate one
        // pool and carve the test rows off the end of each class block.
        const std::size_t test_pc = std::max<std::size_t>(config.blobs_per_class / 4, 1);
        const std::size_t total_pc = config.blobs_per_class + test_pc;
        Rng rng(0xb10b5ULL);
        Dataset pool = synthetic_blobs(config.blobs_classes, total_pc, config.blobs_dim,
                                       config.blobs_spread, rng);
        std::vector<std::size_t> rows;
        for (std::size_t c = 0; c < config.blobs_classes; ++c) {
            const std::size_t base = c * total_pc + (test ? config.blobs_per_class : 0);
            const std::size_t count = test ? test_pc : config.blobs_per_class;
            for (std::size_t i = 0; i < count; ++i) rows.push_back(base + i);
        }
        Dataset ds = subset(pool, rows);
        if (config.task == Task::Reconstruction) ds = make_reconstruction(std::move(ds));
        return ds;
    }

    std::string dir = config.data_dir;
    if (dir.empty()) {
        const char* env = std::getenv("NEUROGROW_DATA");
        if (env) dir = env;
    }
    if (dir.empty())
        throw InputError("no data directory configured (set data_dir or NEUROGROW_DATA)");

    std::vector<std::string> dirs = {dir + "/" + config.dataset, dir};
    if (config.dataset == "fmnist") dirs.insert(dirs.begin() + 1, dir + "/fashion-mnist");

    const std::string img_stem = test ? "t10k-images-idx3-ubyte" : "train-images-idx3-ubyte";
    const std::string lab_stem = test ? "t10k-labels-idx1-ubyte" : "train-labels-idx1-ubyte";
    Dataset ds = load_idx(find_idx_pair(dirs, img_stem), find_idx_pair(dirs, lab_stem));
    ds.name = config.dataset;
    if (config.task == Task::Reconstruction) ds = make_reconstruction(std::move(ds));
    return ds;
}

RunReport run_growth_experiment(const ExperimentConfig& config) {
    config.validate();
    const Dataset full_train = load_experiment_dataset(config, false);
    const Dataset test_set = load_experiment_dataset(config, true);
    const LossKind kind = loss_for_task(config.task);

    RunReport report;
    report.config_hash = config_hash(config);

    for (std::uint64_t seed : config.seeds) {
        SeedRun run;
        run.seed = seed;

        auto [train_set, val_set] =
            split(full_train, SplitSpec{config.val_fraction, splitmix64(seed ^ 0x51171ULL)});
        Rng init_rng(splitmix64(seed ^ 0x1));
        Rng shuffle_rng(splitmix64(seed ^ 0x2));
        Rng growth_rng(splitmix64(seed ^ 0x3));

        Network net = Network::make_mlp(
            full_train.features(), config.hidden_widths, full_train.output_dim(),
            config.task == Task::Reconstruction ? OutputHead::Identity : OutputHead::Logits,
            init_rng);
        AdamState adam = AdamState::for_network(net);

        for (std::size_t s = 1; s <= config.n_stages + 1; ++s) {
            const auto t0 = std::chrono::steady_clock::now();
            StageRecord rec;
            rec.stage = static_cast<int>(s);
            rec.widths_before = widths_of(net);

            rec.epochs_trained =
                train_early_stop(net, adam, train_set, val_set, config, kind, shuffle_rng);
            const EvalResult train_eval = evaluate(net, train_set, config.task);
            const EvalResult val_eval = evaluate(net, val_set, config.task);
            const EvalResult test_eval = evaluate(net, test_set, config.task);
            rec.train_loss = train_eval.loss;
            rec.val_loss = val_eval.loss;
            rec.test_loss = test_eval.loss;
            if (train_eval.accuracy) rec.train_accuracy = *train_eval.accuracy;
            if (test_eval.accuracy) rec.test_accuracy = *test_eval.accuracy;

            if (s <= config.n_stages) {
                const std::size_t budget = static_cast<std::size_t>(
                    std::ceil(config.growth_fraction *
                              static_cast<double>(net.total_hidden_width())));
                ExpansionPlan plan;
                switch (config.distributor) {
                    case DistributorKind::SingleLayer:
                        plan.stage = static_cast<int>(s);
                        plan.per_layer_counts = {budget};
                        break;
                    case DistributorKind::Ras:
                        plan = ras_allocate(budget, net.n_hidden(), growth_rng,
                                            static_cast<int>(s));
                        break;
                    case DistributorKind::Svod: {
                        const std::size_t probes = config.probes_per_layer
                                                       ? config.probes_per_layer
                                                       : std::max<std::size_t>(budget, 8);
                        Batch eval_batch = sample_batch(train_set, 512, growth_rng);
                        plan = svod_allocate(net, budget, probes, eval_batch, kind,
                                             growth_rng, static_cast<int>(s));
                        break;
                    }
                }

                ExtenderContext ctx;
                ctx.loss = kind;
                ctx.lr = config.lr;
                if (config.extender == ExtenderKind::Swe)
                    ctx.adjust_batch = config.adjust_batch_size == 0
                                           ? full_batch(train_set)
                                           : sample_batch(train_set,
                                                          config.adjust_batch_size,
                                                          growth_rng);
                if (config.extender == ExtenderKind::FireflyLite)
                    ctx.train_batches = batches(train_set, config.batch_size, growth_rng);

                apply_plan(net, plan, config.extender, ctx, growth_rng);
                adam.resize_to(net);

                rec.plan = plan;
                rec.inactivity =
                    measure_inactivity(net, train_set.X, static_cast<int>(s));
                if (config.extender == ExtenderKind::Swe &&
                    rec.inactivity.inactive_new() > 0) {
                    std::fprintf(stderr,
                                 "warning: seed %llu stage %zu: %zu of %zu new neurons "
                                 "inactive right after the SWE merge\n",
                                 static_cast<unsigned long long>(seed), s,
                                 rec.inactivity.inactive_new(), rec.inactivity.new_total());
                }
            } else {
                rec.plan.stage = static_cast<int>(s);
                rec.plan.per_layer_counts.assign(net.n_hidden(), 0);
                rec.inactivity = measure_inactivity(net, train_set.X, std::nullopt);
            }

            rec.widths_after = widths_of(net);
            rec.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            run.stages.push_back(std::move(rec));
        }
        run.final_net = std::move(net);
        report.runs.push_back(std::move(run));
    }
    return report;
}

InactivityStudy run_inactivity_study(const ExperimentConfig& config) {
    config.validate();
    if (config.hidden_widths.size() != 1)
        throw ConfigError("inactivity study requires a single hidden layer");

    const Dataset full_train = load_experiment_dataset(config, false);
    const LossKind kind = loss_for_task(config.task);

    InactivityStudy study;
    study.config_hash = config_hash(config);

    for (std::uint64_t seed : config.seeds) {
        auto [train_set, val_set] =
            split(full_train, SplitSpec{config.val_fraction, splitmix64(seed ^ 0x51171ULL)});
        Rng init_rng(splitmix64(seed ^ 0x1));
        Rng shuffle_rng(splitmix64(seed ^ 0x2));

        Network base = Network::make_mlp(
            full_train.features(), config.hidden_widths, full_train.output_dim(),
            config.task == Task::Reconstruction ? OutputHead::Identity : OutputHead::Logits,
            init_rng);
        AdamState base_adam = AdamState::for_network(base);
        train_early_stop(base, base_adam, train_set, val_set, config, kind, shuffle_rng);

        const std::size_t m = base.hidden_width(0);  // doubling
        for (ExtenderKind ext : config.study_extenders) {
            Network net = base;
            AdamState adam = base_adam;
            Rng growth_rng(splitmix64(seed ^ 0x4 ^ static_cast<std::uint64_t>(ext)));
            Rng post_rng(splitmix64(seed ^ 0x6));

            ExpansionPlan plan;
            plan.stage = 1;
            plan.per_layer_counts = {m};
            ExtenderContext ctx;
            ctx.loss = kind;
            ctx.lr = config.lr;
            if (ext == ExtenderKind::Swe)
                ctx.adjust_batch = config.adjust_batch_size == 0
                                       ? full_batch(train_set)
                                       : sample_batch(train_set, config.adjust_batch_size,
                                                      growth_rng);
            if (ext == ExtenderKind::FireflyLite)
                ctx.train_batches = batches(train_set, config.batch_size, growth_rng);
            apply_plan(net, plan, ext, ctx, growth_rng);
            adam.resize_to(net);

            const auto metrics = train(net, adam, train_set, config.study_extra_epochs,
                                       config.batch_size, config.lr, kind, post_rng);
            const InactivityReport rep = measure_inactivity(net, train_set.X, 1);

            InactivityRow row;
            row.extender = extender_name(ext);
            row.seed = seed;
            row.new_total = rep.new_total();
            row.inactive_new = rep.inactive_new();
            row.pct_inactive_new = rep.pct_inactive_new();
            row.final_train_loss = metrics.back().loss;
            study.rows.push_back(row);
        }
    }
    return study;
}

void save_network(const Network& net, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "NGROW1 container assumes a little-endian host");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write " + path);
    f.write("NGROW1", 6);
    const std::uint8_t head = net.head == OutputHead::Identity ? 0 : 1;
    f.write(reinterpret_cast<const char*>(&head), 1);
    const auto n_layers = static_cast<std::uint32_t>(net.layers.size());
    f.write(reinterpret_cast<const char*>(&n_layers), 4);
    for (const auto& layer : net.layers) {
        const auto rows = static_cast<std::uint32_t>(layer.out_dim());
        const auto cols = static_cast<std::uint32_t>(layer.in_dim());
        f.write(reinterpret_cast<const char*>(&rows), 4);
        f.write(reinterpret_cast<const char*>(&cols), 4);
        f.write(reinterpret_cast<const char*>(layer.weights.data()),
                static_cast<std::streamsize>(layer.weights.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(layer.biases.data()),
                static_cast<std::streamsize>(layer.biases.size() * sizeof(double)));
        for (const auto& tag : layer.tags) {
            const auto s = static_cast<std::int32_t>(tag.birth_stage);
            f.write(reinterpret_cast<const char*>(&s), 4);
        }
    }
    if (!f) throw FormatError("write failed: " + path);
}

Network load_network(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    char magic[6];
    f.read(magic, 6);
    if (!f || std::memcmp(magic, "NGROW1", 6) != 0)
        throw FormatError(path + ": bad magic, not an NGROW1 container");
    std::uint8_t head = 0;
    std::uint32_t n_layers = 0;
    f.read(reinterpret_cast<char*>(&head), 1);
    f.read(reinterpret_cast<char*>(&n_layers), 4);
    if (!f || head > 1 || n_layers < 2 || n_layers > 1000)
        throw FormatError(path + ": corrupt header");

    Network net;
    net.head = head == 0 ? OutputHead::Identity : OutputHead::Logits;
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        std::uint32_t rows = 0, cols = 0;
        f.read(reinterpret_cast<char*>(&rows), 4);
        f.read(reinterpret_cast<char*>(&cols), 4);
        if (!f || rows == 0 || cols == 0) throw FormatError(path + ": corrupt layer header");
        DenseLayer layer;
        layer.weights = Matrix(rows, cols);
        layer.biases.resize(rows);
        layer.tags.resize(rows);
        f.read(reinterpret_cast<char*>(layer.weights.data()),
               static_cast<std::streamsize>(layer.weights.size() * sizeof(double)));
        f.read(reinterpret_cast<char*>(layer.biases.data()),
               static_cast<std::streamsize>(rows * sizeof(double)));
        for (auto& tag : layer.tags) {
            std::int32_t s = 0;
            f.read(reinterpret_cast<char*>(&s), 4);
            tag.birth_stage = s;
        }
        if (!f) throw FormatError(path + ": truncated layer payload");
        net.layers.push_back(std::move(layer));
    }
    net.check_consistent();
    return net;
}

void emit_reports(const RunReport& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream csv(out_dir + "/stages.csv");
    if (!csv) throw FormatError("cannot write " + out_dir + "/stages.csv");
    csv << "seed,stage,widths_before,widths_after,plan,epochs_trained,"
           "train_loss,val_loss,test_loss,train_accuracy,test_accuracy,"
           "new_total,inactive_new,hidden_total,inactive_total,seconds\n";
    for (const auto& run : report.runs) {
        for (const auto& rec : run.stages) {
            csv << run.seed << ',' << rec.stage << ',' << join_sizes(rec.widths_before)
                << ',' << join_sizes(rec.widths_after) << ','
                << join_sizes(rec.plan.per_layer_counts) << ',' << rec.epochs_trained << ','
                << fmt_double(rec.train_loss) << ',' << fmt_double(rec.val_loss) << ','
                << fmt_double(rec.test_loss) << ',' << fmt_double(rec.train_accuracy) << ','
                << fmt_double(rec.test_accuracy) << ',' << rec.inactivity.new_total() << ','
                << rec.inactivity.inactive_new() << ',' << rec.inactivity.total_neurons()
                << ',' << rec.inactivity.inactive_total() << ',' << fmt_double(rec.seconds)
                << '\n';
        }
    }

    json summary;
    summary["config_hash"] = report.config_hash;
    summary["n_seeds"] = report.runs.size();
    json stages = json::array();
    if (!report.runs.empty()) {
        const std::size_t n_stages = report.runs.front().stages.size();
        for (std::size_t s = 0; s < n_stages; ++s) {
            auto stat = [&](auto getter) {
                double mean = 0.0;
                for (const auto& run : report.runs) mean += getter(run.stages[s]);
                mean /= static_cast<double>(report.runs.size());
                double var = 0.0;
                for (const auto& run : report.runs) {
                    const double d = getter(run.stages[s]) - mean;
                    var += d * d;
                }
                var /= static_cast<double>(report.runs.size());
                return std::pair{mean, std::sqrt(var)};
            };
            const auto [ltr, ltr_sd] = stat([](const StageRecord& r) { return r.train_loss; });
            const auto [lte, lte_sd] = stat([](const StageRecord& r) { return r.test_loss; });
            const auto [acc, acc_sd] =
                stat([](const StageRecord& r) { return r.test_accuracy; });
            json js;
            js["stage"] = report.runs.front().stages[s].stage;
            js["mean_train_loss"] = ltr;
            js["std_train_loss"] = ltr_sd;
            js["mean_test_loss"] = lte;
            js["std_test_loss"] = lte_sd;
            js["mean_test_accuracy"] = acc;
            js["std_test_accuracy"] = acc_sd;
            stages.push_back(js);
        }
    }
    summary["stages"] = stages;
    std::ofstream js(out_dir + "/summary.json");
    if (!js) throw FormatError("cannot write " + out_dir + "/summary.json");
    js << summary.dump(2) << '\n';
}

void emit_inactivity(const InactivityStudy& study, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream csv(out_dir + "/inactivity.csv");
    if (!csv) throw FormatError("cannot write " + out_dir + "/inactivity.csv");
    csv << "extender,seed,new_total,inactive_new,pct_inactive_new,final_train_loss\n";
    for (const auto& row : study.rows) {
        csv << row.extender << ',' << row.seed << ',' << row.new_total << ','
            << row.inactive_new << ',' << fmt_double(row.pct_inactive_new) << ','
            << fmt_double(row.final_train_loss) << '\n';
    }
}

}  // namespace neurogrow
