#include "neurogrow/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace neurogrow {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<unsigned char> gunzip(const std::vector<unsigned char>& in, const std::string& path) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK)  // 15+16: gzip wrapper
        throw FormatError("zlib init failed for " + path);
    std::vector<unsigned char> out;
    std::vector<unsigned char> buf(1 << 16);
    zs.next_in = const_cast<unsigned char*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buf.data();
        zs.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("corrupt gzip stream: " + path);
        }
        out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
}

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off,
                        const std::string& path) {
    if (off + 4 > b.size())
        throw FormatError(path + ": truncated at byte offset " + std::to_string(off));
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

void write_be32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

bool has_gz_suffix(const std::string& path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::optional<bool> gz) {
    auto load = [&](const std::string& path) {
        auto bytes = read_file(path);
        const bool compressed = gz.value_or(has_gz_suffix(path));
        return compressed ? gunzip(bytes, path) : bytes;
    };
    const auto img = load(images_path);
    const auto lab = load(labels_path);

    if (read_be32(img, 0, images_path) != kImagesMagic)
        throw FormatError(images_path + ": bad IDX image magic at byte offset 0");
    const std::size_t n = read_be32(img, 4, images_path);
    const std::size_t rows = read_be32(img, 8, images_path);
    const std::size_t cols = read_be32(img, 12, images_path);
    const std::size_t pixels = rows * cols;
    if (img.size() != 16 + n * pixels)
        throw FormatError(images_path + ": payload size mismatch at byte offset " +
                          std::to_string(img.size()));

    if (read_be32(lab, 0, labels_path) != kLabelsMagic)
        throw FormatError(labels_path + ": bad IDX label magic at byte offset 0");
    const std::size_t nl = read_be32(lab, 4, labels_path);
    if (nl != n)
        throw FormatError(labels_path + ": label count " + std::to_string(nl) +
                          " differs from image count " + std::to_string(n));
    if (lab.size() != 8 + nl)
        throw FormatError(labels_path + ": payload size mismatch at byte offset " +
                          std::to_string(lab.size()));

    Dataset ds;
    ds.X = Matrix(n, pixels);
    for (std::size_t i = 0; i < n * pixels; ++i)
        ds.X.values()[i] = static_cast<double>(img[16 + i]) / 255.0;
    ds.labels.resize(n);
    int max_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels[i] = static_cast<int>(lab[8 + i]);
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.n_classes = static_cast<std::size_t>(max_label) + 1;
    ds.task = Task::Classification;
    return ds;
}

void write_idx(const Dataset& ds, const std::string& images_path,
               const std::string& labels_path) {
    // Feature layout is written as n x 1 x cols unless the width is a perfect
    // square (the 28x28 image case); round-trips either way.
    std::size_t rows = 1, cols = ds.features();
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(double(cols))));
    if (side * side == cols) rows = cols = side;

    std::ofstream fi(images_path, std::ios::binary);
    if (!fi) throw FormatError("cannot write " + images_path);
    write_be32(fi, kImagesMagic);
    write_be32(fi, static_cast<std::uint32_t>(ds.size()));
    write_be32(fi, static_cast<std::uint32_t>(rows));
    write_be32(fi, static_cast<std::uint32_t>(cols));
    for (double v : ds.X.values()) {
        const auto byte = static_cast<unsigned char>(std::lround(v * 255.0));
        fi.write(reinterpret_cast<const char*>(&byte), 1);
    }

    std::ofstream fl(labels_path, std::ios::binary);
    if (!fl) throw FormatError("cannot write " + labels_path);
    write_be32(fl, kLabelsMagic);
    write_be32(fl, static_cast<std::uint32_t>(ds.size()));
    for (int y : ds.labels) {
        const auto byte = static_cast<unsigned char>(y);
        fl.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

Dataset make_reconstruction(Dataset ds) {
    ds.targets = ds.X;
    ds.task = Task::Reconstruction;
    return ds;
}

Dataset synthetic_blobs(std::size_t n_classes, std::size_t n_per_class, std::size_t dim,
                        double spread, Rng& rng) {
    if (n_classes == 0 || n_per_class == 0 || dim == 0)
        throw InputError("synthetic_blobs: all counts must be >= 1");
    const std::size_t n = n_classes * n_per_class;
    Matrix X(n, dim);
    std::vector<int> labels(n);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix centers(n_classes, dim);
    for (double& v : centers.values()) v = unit(rng);

    std::normal_distribution<double> noise(0.0, spread);
    std::size_t r = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t s = 0; s < n_per_class; ++s, ++r) {
            labels[r] = static_cast<int>(c);
            for (std::size_t d = 0; d < dim; ++d)
                X(r, d) = centers(c, d) + (spread > 0.0 ? noise(rng) : 0.0);
        }
    }

    double lo = X.values()[0], hi = X.values()[0];
    for (double v : X.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    for (double& v : X.values()) v = range > 1e-12 ? (v - lo) / range : 0.5;

    Dataset ds;
    ds.X = std::move(X);
    ds.labels = std::move(labels);
    ds.n_classes = n_classes;
    ds.name = "blobs";
    ds.task = Task::Classification;
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    if (spec.val_fraction <= 0.0 || spec.val_fraction >= 1.0)
        throw InputError("split: val_fraction must be in (0,1)");
    const std::size_t n = ds.size();
    const auto n_val = static_cast<std::size_t>(std::lround(spec.val_fraction * double(n)));
    if (n_val == 0 || n_val == n) throw InputError("split: a part would be empty");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(spec.seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::size_t> train_idx(idx.begin(), idx.end() - static_cast<long>(n_val));
    std::vector<std::size_t> val_idx(idx.end() - static_cast<long>(n_val), idx.end());
    return {subset(ds, train_idx), subset(ds, val_idx)};
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.name = ds.name;
    out.task = ds.task;
    out.n_classes = ds.n_classes;
    out.X = Matrix(indices.size(), ds.features());
    if (ds.targets.rows() > 0) out.targets = Matrix(indices.size(), ds.targets.cols());
    if (!ds.labels.empty()) out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        std::memcpy(out.X.row(i), ds.X.row(src), ds.features() * sizeof(double));
        if (ds.targets.rows() > 0)
            std::memcpy(out.targets.row(i), ds.targets.row(src),
                        ds.targets.cols() * sizeof(double));
        if (!ds.labels.empty()) out.labels[i] = ds.labels[src];
    }
    return out;
}

std::vector<Batch> batches(const Dataset& ds, std::size_t batch_size, Rng& rng) {
    if (batch_size == 0) throw InputError("batches: batch_size must be >= 1");
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<Batch> out;
    for (std::size_t start = 0; start < idx.size(); start += batch_size) {
        const std::size_t stop = std::min(start + batch_size, idx.size());
        std::vector<std::size_t> chunk(idx.begin() + static_cast<long>(start),
                                       idx.begin() + static_cast<long>(stop));
        Dataset sub = subset(ds, chunk);
        out.push_back({std::move(sub.X), std::move(sub.targets), std::move(sub.labels)});
    }
    return out;
}

Batch full_batch(const Dataset& ds) {
    return {ds.X, ds.targets, ds.labels};
}

Batch sample_batch(const Dataset& ds, std::size_t n, Rng& rng) {
    if (n >= ds.size()) return full_batch(ds);
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n);
    Dataset sub = subset(ds, idx);
    return {std::move(sub.X), std::move(sub.targets), std::move(sub.labels)};
}

}  // namespace neurogrow
