#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "guardnet/data_io.hpp"

using namespace guardnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("guardnet_data_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("load_idx decodes a hand-crafted 2-image 2x2 pair") {
    // Built byte-by-byte from the container layout: BE magic, counts, dims.
    std::vector<std::uint8_t> images;
    put_be32(images, 0x00000803);
    put_be32(images, 2);
    put_be32(images, 2);
    put_be32(images, 2);
    for (std::uint8_t b : {0, 51, 102, 255, 255, 204, 153, 0}) images.push_back(b);

    std::vector<std::uint8_t> labels;
    put_be32(labels, 0x00000801);
    put_be32(labels, 2);
    labels.push_back(7);
    labels.push_back(1);

    TempDir dir;
    write_bytes(dir.file("imgs"), images);
    write_bytes(dir.file("lbls"), labels);

    const LabeledDataset data = load_idx(dir.file("imgs"), dir.file("lbls"));
    REQUIRE(data.size() == 2);
    CHECK(data.inputs[0].shape() == Shape{2, 2});
    CHECK(data.inputs[0] == Tensor({2, 2}, {0.0, 51.0 / 255.0, 102.0 / 255.0, 1.0}));
    CHECK(data.inputs[1][0] == 1.0);  // byte 255 -> exactly 1.0
    CHECK(data.labels == std::vector<int>{7, 1});
    CHECK_FALSE(data.has_validity_labels());
}

TEST_CASE("load_idx error paths") {
    TempDir dir;
    std::vector<std::uint8_t> images;
    put_be32(images, 0x00000803);
    put_be32(images, 1);
    put_be32(images, 2);
    put_be32(images, 2);
    for (int i = 0; i < 4; ++i) images.push_back(9);

    std::vector<std::uint8_t> labels;
    put_be32(labels, 0x00000801);
    put_be32(labels, 1);
    labels.push_back(0);

    SUBCASE("count mismatch is an integrity error") {
        auto bad_labels = labels;
        bad_labels[7] = 2;  // declare two labels
        bad_labels.push_back(1);
        write_bytes(dir.file("imgs"), images);
        write_bytes(dir.file("lbls"), bad_labels);
        CHECK_THROWS_AS(load_idx(dir.file("imgs"), dir.file("lbls")), IntegrityError);
    }
    SUBCASE("wrong magic is a format error") {
        auto bad = images;
        bad[3] = 0x77;
        write_bytes(dir.file("imgs"), bad);
        write_bytes(dir.file("lbls"), labels);
        CHECK_THROWS_AS(load_idx(dir.file("imgs"), dir.file("lbls")), FormatError);
    }
    SUBCASE("truncated payload is a parse error with an offset") {
        auto bad = images;
        bad.resize(bad.size() - 2);
        write_bytes(dir.file("imgs"), bad);
        write_bytes(dir.file("lbls"), labels);
        try {
            load_idx(dir.file("imgs"), dir.file("lbls"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.byte_offset() == 16);
        }
    }
}

TEST_CASE("write_idx then load_idx reproduces files byte-for-byte") {
    TempDir dir;
    Rng rng(71);
    LabeledDataset data;
    for (int i = 0; i < 5; ++i) {
        Tensor img({3, 4});
        for (std::size_t p = 0; p < img.size(); ++p) {
            img[p] = static_cast<double>(rng.next_below(256)) / 255.0;
        }
        data.inputs.push_back(img);
        data.labels.push_back(static_cast<int>(rng.next_below(10)));
    }
    write_idx(data, dir.file("a_imgs"), dir.file("a_lbls"));
    const LabeledDataset loaded = load_idx(dir.file("a_imgs"), dir.file("a_lbls"));
    write_idx(loaded, dir.file("b_imgs"), dir.file("b_lbls"));

    CHECK(slurp(dir.file("a_imgs")) == slurp(dir.file("b_imgs")));
    CHECK(slurp(dir.file("a_lbls")) == slurp(dir.file("b_lbls")));
}

TEST_CASE("make_clusters is deterministic and sized correctly") {
    Rng a(12), b(12);
    const LabeledDataset d1 = make_clusters(a, 3, 4, 10, 5.0);
    const LabeledDataset d2 = make_clusters(b, 3, 4, 10, 5.0);
    REQUIRE(d1.size() == 30);
    for (std::size_t i = 0; i < d1.size(); ++i) {
        CHECK(d1.inputs[i] == d2.inputs[i]);
        CHECK(d1.labels[i] == d2.labels[i]);
    }

    Rng c(1);
    const LabeledDataset single = make_clusters(c, 4, 2, 1, 3.0);
    CHECK(single.size() == 4);

    Rng d(1);
    CHECK_THROWS_AS(make_clusters(d, 2, 1, 5, 3.0), ConfigError);
    CHECK_THROWS_AS(make_clusters(d, 2, 4, 5, 0.0), ConfigError);
    CHECK_THROWS_AS(make_clusters(d, 0, 4, 5, 3.0), ConfigError);
}

TEST_CASE("cluster sample means converge to their centroids") {
    Rng rng(99);
    const std::size_t per_class = 400, dim = 6;
    const LabeledDataset data = make_clusters(rng, 3, dim, per_class, 6.0);
    const double bound = 4.0 / std::sqrt(static_cast<double>(per_class));

    for (int cls = 0; cls < 3; ++cls) {
        Tensor mean({dim});
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] != cls) continue;
            for (std::size_t d = 0; d < dim; ++d) mean[d] += data.inputs[i][d];
        }
        for (std::size_t d = 0; d < dim; ++d) mean[d] /= static_cast<double>(per_class);
        const Tensor centroid = cluster_centroid(cls, dim, 6.0);
        for (std::size_t d = 0; d < dim; ++d) {
            CHECK(std::abs(mean[d] - centroid[d]) <= bound);
        }
    }
}

TEST_CASE("nearest-centroid accuracy on separation-6 blobs") {
    Rng rng(123);
    const std::size_t dim = 8;
    const LabeledDataset data = make_clusters(rng, 2, dim, 500, 6.0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double best = 1e300;
        int best_cls = -1;
        for (int cls = 0; cls < 2; ++cls) {
            const Tensor centroid = cluster_centroid(cls, dim, 6.0);
            double dist = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                dist += (data.inputs[i][d] - centroid[d]) * (data.inputs[i][d] - centroid[d]);
            }
            if (dist < best) {
                best = dist;
                best_cls = cls;
            }
        }
        if (best_cls == data.labels[i]) ++correct;
    }
    CHECK(static_cast<double>(correct) / data.size() >= 0.99);
}

TEST_CASE("inject_invalid replaces the floored count and flags positions") {
    Rng data_rng(7);
    const LabeledDataset valid = make_clusters(data_rng, 2, 4, 50, 6.0);  // 100 items
    LabeledDataset pool = make_clusters(data_rng, 1, 4, 50, 6.0);
    for (Tensor& t : pool.inputs) t = add(t, Tensor::full({4}, 40.0));

    Rng rng(13);
    const LabeledDataset mixed = inject_invalid(valid, pool, 0.3, rng);
    REQUIRE(mixed.size() == valid.size());
    REQUIRE(mixed.has_validity_labels());

    std::size_t flagged = 0;
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        if (mixed.validity_labels[i]) {
            ++flagged;
            // Replaced items come from the pool.
            const bool from_pool =
                std::find(pool.inputs.begin(), pool.inputs.end(), mixed.inputs[i]) !=
                pool.inputs.end();
            CHECK(from_pool);
        } else {
            CHECK(mixed.inputs[i] == valid.inputs[i]);
        }
    }
    CHECK(flagged == 30);
}

TEST_CASE("inject_invalid preserves length and untouched items; tiny fractions floor to zero") {
    Rng data_rng(8);
    const LabeledDataset valid = make_clusters(data_rng, 2, 3, 10, 6.0);
    const LabeledDataset pool = make_clusters(data_rng, 1, 3, 5, 6.0);

    Rng rng(5);
    const LabeledDataset untouched = inject_invalid(valid, pool, 0.01, rng);
    CHECK(untouched.size() == valid.size());
    for (std::size_t i = 0; i < valid.size(); ++i) {
        CHECK(untouched.inputs[i] == valid.inputs[i]);
        CHECK_FALSE(untouched.validity_labels[i]);
    }
}

TEST_CASE("inject_invalid near fraction 1 with a large pool flags almost everything") {
    Rng data_rng(9);
    const LabeledDataset valid = make_clusters(data_rng, 2, 3, 10, 6.0);   // 20
    const LabeledDataset pool = make_clusters(data_rng, 2, 3, 15, 6.0);    // 30

    Rng rng(6);
    const LabeledDataset mixed = inject_invalid(valid, pool, 0.95, rng);
    std::size_t flagged = 0;
    std::map<std::vector<double>, int> seen;
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        if (!mixed.validity_labels[i]) continue;
        ++flagged;
        // Without replacement: no pool item appears twice.
        CHECK(++seen[mixed.inputs[i].data()] == 1);
    }
    CHECK(flagged == 19);
}

TEST_CASE("inject_invalid validates arguments") {
    Rng data_rng(10);
    const LabeledDataset valid = make_clusters(data_rng, 2, 3, 5, 6.0);
    const LabeledDataset pool = make_clusters(data_rng, 1, 3, 5, 6.0);
    const LabeledDataset pool_wrong_shape = make_clusters(data_rng, 1, 4, 5, 6.0);

    Rng rng(2);
    CHECK_THROWS_AS(inject_invalid(valid, pool, 0.0, rng), ConfigError);
    CHECK_THROWS_AS(inject_invalid(valid, pool, 1.0, rng), ConfigError);
    CHECK_THROWS_AS(inject_invalid(valid, LabeledDataset{}, 0.5, rng), DataError);
    CHECK_THROWS_AS(inject_invalid(valid, pool_wrong_shape, 0.5, rng), ShapeError);
}

TEST_CASE("sha256 matches the published test vector") {
    const std::vector<std::uint8_t> abc{'a', 'b', 'c'};
    CHECK(sha256_hex(abc) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex({}) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("dataset manifests round-trip and guard the checksum") {
    TempDir dir;
    Rng rng(5);
    LabeledDataset data;
    for (int i = 0; i < 3; ++i) {
        Tensor img({2, 2});
        for (std::size_t p = 0; p < img.size(); ++p) {
            img[p] = static_cast<double>(rng.next_below(256)) / 255.0;
        }
        data.inputs.push_back(img);
        data.labels.push_back(i);
    }
    write_idx(data, dir.file("imgs"), dir.file("lbls"));

    const DatasetManifest manifest =
        make_dataset_manifest(dir.file("imgs"), dir.file("lbls"), "unit fixture");
    CHECK(manifest.sha256.size() == 64);
    write_dataset_manifest(manifest, dir.file("manifest.json"));

    const DatasetManifest loaded = read_dataset_manifest(dir.file("manifest.json"));
    CHECK(loaded.images == manifest.images);
    CHECK(loaded.source == "unit fixture");
    CHECK(loaded.sha256 == manifest.sha256);

    const LabeledDataset via_manifest = load_idx_from_manifest(dir.file("manifest.json"));
    CHECK(via_manifest.size() == 3);
    CHECK(via_manifest.inputs[0] == data.inputs[0]);

    // Tampering with the payload breaks the checksum.
    auto bytes = slurp(dir.file("imgs"));
    bytes.back() ^= 0xFF;
    write_bytes(dir.file("imgs"), bytes);
    CHECK_THROWS_AS(load_idx_from_manifest(dir.file("manifest.json")), IntegrityError);
}

TEST_CASE("manifest paths resolve relative to the manifest file") {
    TempDir dir;
    fs::create_directories(dir.path / "sub");
    Rng rng(6);
    LabeledDataset data;
    Tensor img({2, 2});
    for (std::size_t p = 0; p < img.size(); ++p) {
        img[p] = static_cast<double>(rng.next_below(256)) / 255.0;
    }
    data.inputs.push_back(img);
    data.labels.push_back(4);
    write_idx(data, dir.file("sub/imgs"), dir.file("sub/lbls"));

    DatasetManifest manifest =
        make_dataset_manifest(dir.file("sub/imgs"), dir.file("sub/lbls"), "fixture");
    manifest.images = "imgs";
    manifest.labels = "lbls";
    write_dataset_manifest(manifest, dir.file("sub/manifest.json"));
    const LabeledDataset loaded = load_idx_from_manifest(dir.file("sub/manifest.json"));
    CHECK(loaded.labels == std::vector<int>{4});
}

TEST_CASE("center_crop_pad crops and pads around the middle") {
    const Tensor img({4, 4}, {1, 2, 3, 4,
                              5, 6, 7, 8,
                              9, 10, 11, 12,
                              13, 14, 15, 16});
    const Tensor cropped = center_crop_pad(img, {2, 2});
    CHECK(cropped == Tensor({2, 2}, {6, 7, 10, 11}));

    const Tensor padded = center_crop_pad(cropped, {4, 4});
    CHECK(padded == Tensor({4, 4}, {0, 0, 0, 0,
                                    0, 6, 7, 0,
                                    0, 10, 11, 0,
                                    0, 0, 0, 0}));

    const Tensor mixed = center_crop_pad(img, {2, 6});
    CHECK(mixed == Tensor({2, 6}, {0, 5, 6, 7, 8, 0,
                                   0, 9, 10, 11, 12, 0}));

    CHECK_THROWS_AS(center_crop_pad(img, {2, 2, 2}), ShapeError);
}
