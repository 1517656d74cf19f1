#include <doctest.h>

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "neurogrow/data.hpp"

using namespace neurogrow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ngrow_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const char* name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<long>(bytes.size()));
}

// Two 2x2 "images" with pixel values 0, 51, 102, 255 and labels 3, 7,
// hand-assembled byte by byte against the IDX layout.
std::vector<unsigned char> tiny_images() {
    return {0x00, 0x00, 0x08, 0x03,       // magic 0x803 (unsigned byte, 3 dims)
            0x00, 0x00, 0x00, 0x02,       // n = 2
            0x00, 0x00, 0x00, 0x02,       // rows = 2
            0x00, 0x00, 0x00, 0x02,       // cols = 2
            0,    51,   102,  255,        // image 0
            255,  204,  153,  0};         // image 1
}

std::vector<unsigned char> tiny_labels() {
    return {0x00, 0x00, 0x08, 0x01,       // magic 0x801 (unsigned byte, 1 dim)
            0x00, 0x00, 0x00, 0x02,       // n = 2
            3,    7};
}

std::vector<unsigned char> gzip_bytes(const std::vector<unsigned char>& in) {
    z_stream zs{};
    REQUIRE(deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                         Z_DEFAULT_STRATEGY) == Z_OK);
    std::vector<unsigned char> out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = const_cast<unsigned char*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
    out.resize(out.size() - zs.avail_out);
    deflateEnd(&zs);
    return out;
}

}  // namespace

TEST_CASE("load_idx decodes a hand-assembled fixture exactly") {
    TempDir tmp;
    write_bytes(tmp.file("imgs"), tiny_images());
    write_bytes(tmp.file("labs"), tiny_labels());
    Dataset ds = load_idx(tmp.file("imgs"), tmp.file("labs"));

    CHECK(ds.size() == 2);
    CHECK(ds.features() == 4);
    CHECK(ds.task == Task::Classification);
    CHECK(ds.n_classes == 8);  // max label 7
    CHECK(ds.labels == std::vector<int>{3, 7});

    const double expect0[] = {0.0, 51.0 / 255.0, 102.0 / 255.0, 1.0};
    const double expect1[] = {1.0, 204.0 / 255.0, 153.0 / 255.0, 0.0};
    for (int j = 0; j < 4; ++j) {
        CHECK(ds.X(0, j) == expect0[j]);
        CHECK(ds.X(1, j) == expect1[j]);
    }
}

TEST_CASE("load_idx reads gzip-compressed files, by suffix or by flag") {
    TempDir tmp;
    write_bytes(tmp.file("imgs.gz"), gzip_bytes(tiny_images()));
    write_bytes(tmp.file("labs.gz"), gzip_bytes(tiny_labels()));
    Dataset by_suffix = load_idx(tmp.file("imgs.gz"), tmp.file("labs.gz"));
    CHECK(by_suffix.size() == 2);
    CHECK(by_suffix.labels == std::vector<int>{3, 7});

    write_bytes(tmp.file("imgs.bin"), gzip_bytes(tiny_images()));
    write_bytes(tmp.file("labs.bin"), gzip_bytes(tiny_labels()));
    Dataset by_flag = load_idx(tmp.file("imgs.bin"), tmp.file("labs.bin"), true);
    CHECK(by_flag.X == by_suffix.X);
}

TEST_CASE("load_idx errors name the offending file and byte offset") {
    TempDir tmp;
    auto imgs = tiny_images();
    auto labs = tiny_labels();

    SUBCASE("missing file") {
        CHECK_THROWS_WITH_AS(load_idx(tmp.file("nope"), tmp.file("nope2")),
                             doctest::Contains("nope"), FormatError);
    }
    SUBCASE("truncated header") {
        write_bytes(tmp.file("imgs"), {0x00, 0x00, 0x08});
        write_bytes(tmp.file("labs"), labs);
        try {
            load_idx(tmp.file("imgs"), tmp.file("labs"));
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("imgs") != std::string::npos);
            CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
        }
    }
    SUBCASE("wrong magic") {
        imgs[3] = 0x01;
        write_bytes(tmp.file("imgs"), imgs);
        write_bytes(tmp.file("labs"), labs);
        CHECK_THROWS_WITH_AS(load_idx(tmp.file("imgs"), tmp.file("labs")),
                             doctest::Contains("magic"), FormatError);
    }
    SUBCASE("short payload") {
        imgs.pop_back();
        write_bytes(tmp.file("imgs"), imgs);
        write_bytes(tmp.file("labs"), labs);
        CHECK_THROWS_WITH_AS(load_idx(tmp.file("imgs"), tmp.file("labs")),
                             doctest::Contains("size mismatch"), FormatError);
    }
    SUBCASE("label count mismatch") {
        labs[7] = 3;  // claims 3 labels, images say 2
        labs.push_back(1);
        write_bytes(tmp.file("imgs"), imgs);
        write_bytes(tmp.file("labs"), labs);
        CHECK_THROWS_WITH_AS(load_idx(tmp.file("imgs"), tmp.file("labs")),
                             doctest::Contains("differs from image count"), FormatError);
    }
    SUBCASE("corrupt gzip stream") {
        auto gz = gzip_bytes(imgs);
        gz[gz.size() / 2] ^= 0xff;
        write_bytes(tmp.file("imgs.gz"), gz);
        write_bytes(tmp.file("labs"), labs);
        CHECK_THROWS_WITH_AS(load_idx(tmp.file("imgs.gz"), tmp.file("labs")),
                             doctest::Contains("gzip"), FormatError);
    }
}

TEST_CASE("write_idx then load_idx round-trips values and labels") {
    TempDir tmp;
    write_bytes(tmp.file("imgs"), tiny_images());
    write_bytes(tmp.file("labs"), tiny_labels());
    Dataset ds = load_idx(tmp.file("imgs"), tmp.file("labs"));

    write_idx(ds, tmp.file("imgs2"), tmp.file("labs2"));
    Dataset back = load_idx(tmp.file("imgs2"), tmp.file("labs2"));
    CHECK(back.X == ds.X);  // byte-quantized values survive exactly
    CHECK(back.labels == ds.labels);
}

TEST_CASE("make_reconstruction turns inputs into targets") {
    Rng rng(401);
    Dataset ds = synthetic_blobs(3, 4, 5, 0.1, rng);
    Dataset rec = make_reconstruction(ds);
    CHECK(rec.task == Task::Reconstruction);
    CHECK(rec.targets == rec.X);
    CHECK(rec.output_dim() == 5);
    CHECK(ds.output_dim() == 3);
}

TEST_CASE("synthetic_blobs: shape, range, labels, determinism") {
    Rng a(403), b(403), c(404);
    Dataset d1 = synthetic_blobs(4, 16, 6, 0.05, a);
    Dataset d2 = synthetic_blobs(4, 16, 6, 0.05, b);
    Dataset d3 = synthetic_blobs(4, 16, 6, 0.05, c);

    CHECK(d1.size() == 64);
    CHECK(d1.features() == 6);
    CHECK(d1.n_classes == 4);
    CHECK(d1.X == d2.X);
    CHECK(d1.X != d3.X);

    double lo = 1e9, hi = -1e9;
    for (double v : d1.X.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);
    for (std::size_t i = 0; i < 64; ++i) CHECK(d1.labels[i] == int(i / 16));

    CHECK_THROWS_AS(synthetic_blobs(0, 4, 2, 0.1, a), InputError);
}

TEST_CASE("synthetic_blobs with a small spread is linearly separated by class means") {
    Rng rng(409);
    Dataset ds = synthetic_blobs(3, 32, 4, 0.01, rng);
    // Every sample must be closer to its own class mean than to any other.
    Matrix means(3, 4);
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t d = 0; d < 4; ++d)
            means(std::size_t(ds.labels[i]), d) += ds.X(i, d) / 32.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::size_t best = 0;
        double bestd = 1e18;
        for (std::size_t c = 0; c < 3; ++c) {
            double dist = 0.0;
            for (std::size_t d = 0; d < 4; ++d) {
                const double diff = ds.X(i, d) - means(c, d);
                dist += diff * diff;
            }
            if (dist < bestd) {
                bestd = dist;
                best = c;
            }
        }
        CHECK(int(best) == ds.labels[i]);
    }
}

TEST_CASE("split partitions the dataset with the requested sizes") {
    Rng rng(419);
    Dataset ds = synthetic_blobs(2, 50, 3, 0.1, rng);  // 100 samples
    auto [train, val] = split(ds, {0.2, 7});
    CHECK(train.size() == 80);
    CHECK(val.size() == 20);

    // Partition property: every original row appears exactly once overall.
    auto key = [&](const Dataset& d, std::size_t i) {
        return std::make_pair(d.X(i, 0), d.X(i, 1));
    };
    std::set<std::pair<double, double>> seen;
    for (std::size_t i = 0; i < train.size(); ++i) seen.insert(key(train, i));
    for (std::size_t i = 0; i < val.size(); ++i) seen.insert(key(val, i));
    std::set<std::pair<double, double>> original;
    for (std::size_t i = 0; i < ds.size(); ++i) original.insert(key(ds, i));
    CHECK(seen == original);

    // Same seed, same split; different seed, different split.
    auto [t2, v2] = split(ds, {0.2, 7});
    CHECK(t2.X == train.X);
    auto [t3, v3] = split(ds, {0.2, 8});
    CHECK(t3.X != train.X);

    CHECK_THROWS_AS(split(ds, {0.0, 1}), InputError);
    CHECK_THROWS_AS(split(ds, {1.0, 1}), InputError);
}

TEST_CASE("batches: sizes 3,3,3,1 for 10 samples, and conservation") {
    Rng rng(421);
    Dataset ds = synthetic_blobs(2, 5, 3, 0.1, rng);  // 10 samples
    Rng shuffle(5);
    auto bs = batches(ds, 3, shuffle);
    REQUIRE(bs.size() == 4);
    CHECK(bs[0].size() == 3);
    CHECK(bs[1].size() == 3);
    CHECK(bs[2].size() == 3);
    CHECK(bs[3].size() == 1);

    std::multiset<double> seen, original;
    for (const auto& b : bs)
        for (std::size_t i = 0; i < b.size(); ++i) seen.insert(b.inputs(i, 0));
    for (std::size_t i = 0; i < ds.size(); ++i) original.insert(ds.X(i, 0));
    CHECK(seen == original);

    CHECK_THROWS_AS(batches(ds, 0, shuffle), InputError);
}

TEST_CASE("full_batch and sample_batch") {
    Rng rng(431);
    Dataset ds = make_reconstruction(synthetic_blobs(2, 8, 3, 0.1, rng));
    Batch fb = full_batch(ds);
    CHECK(fb.inputs == ds.X);
    CHECK(fb.targets == ds.targets);

    Rng s(6);
    Batch sb = sample_batch(ds, 5, s);
    CHECK(sb.size() == 5);
    CHECK(sb.targets.rows() == 5);
    Batch all = sample_batch(ds, 100, s);
    CHECK(all.size() == ds.size());

    Rng s1(9), s2(9);
    CHECK(sample_batch(ds, 5, s1).inputs == sample_batch(ds, 5, s2).inputs);
}

TEST_CASE("subset copies targets and labels coherently") {
    Rng rng(433);
    Dataset ds = make_reconstruction(synthetic_blobs(2, 4, 3, 0.1, rng));
    Dataset sub = subset(ds, {7, 0, 3});
    CHECK(sub.size() == 3);
    for (std::size_t d = 0; d < 3; ++d) {
        CHECK(sub.X(0, d) == ds.X(7, d));
        CHECK(sub.X(1, d) == ds.X(0, d));
        CHECK(sub.targets(2, d) == ds.targets(3, d));
    }
    CHECK(sub.labels == std::vector<int>{ds.labels[7], ds.labels[0], ds.labels[3]});
}
