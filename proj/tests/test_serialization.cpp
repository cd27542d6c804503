#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "guardnet/assertion.hpp"
#include "guardnet/nn.hpp"
#include "guardnet/tensor.hpp"

using namespace guardnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("guardnet_serial_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Network sample_net(std::uint64_t seed) {
    Rng rng(seed);
    Network net({Layer::conv2d(1, 2, 3, 1), Layer::relu(), Layer::maxpool2d(2, 2),
                 Layer::flatten(), Layer::dense(8, 5), Layer::relu(), Layer::dense(5, 3)});
    init_parameters(net, rng);
    return net;
}

}  // namespace

TEST_CASE("model round-trip is bit-identical") {
    TempDir dir;
    const Network net = sample_net(404);
    const std::string path = dir.file("model.snet");
    save_model(net, path);
    const Network loaded = load_model(path);

    REQUIRE(loaded.layers().size() == net.layers().size());
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        CHECK(loaded.layers()[i].kind == net.layers()[i].kind);
        CHECK(loaded.layers()[i].weight == net.layers()[i].weight);
        CHECK(loaded.layers()[i].bias == net.layers()[i].bias);
    }

    // forward outputs bit-identical after the round trip
    Rng rng(1);
    const Tensor x = draw_normal(rng, {1, 6, 6}, 0.5, 0.2);
    CHECK(forward(net, x).data() == forward(loaded, x).data());

    // saving the loaded model reproduces the file bytes
    const std::string path2 = dir.file("model2.snet");
    save_model(loaded, path2);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("truncated model files raise parse errors, never partial networks") {
    TempDir dir;
    const Network net = sample_net(7);
    const std::string path = dir.file("model.snet");
    save_model(net, path);
    const auto bytes = slurp(path);

    for (std::size_t cut : {std::size_t{2}, std::size_t{6}, std::size_t{11},
                            bytes.size() / 2, bytes.size() - 1}) {
        const std::string trunc = dir.file("trunc.snet");
        std::ofstream out(trunc, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(cut));
        out.close();
        CHECK_THROWS_AS(load_model(trunc), ParseError);
    }
}

TEST_CASE("wrong magic and unsupported version are rejected") {
    TempDir dir;
    const Network net = sample_net(7);
    const std::string path = dir.file("model.snet");
    save_model(net, path);
    auto bytes = slurp(path);

    auto write_bytes = [&dir](const std::vector<std::uint8_t>& b) {
        const std::string p = dir.file("bad.snet");
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(b.data()),
                  static_cast<std::streamsize>(b.size()));
        return p;
    };

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(load_model(write_bytes(bad_magic)), FormatError);

    auto bad_version = bytes;
    bad_version[4] = 9;
    CHECK_THROWS_AS(load_model(write_bytes(bad_version)), FormatError);

    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(load_model(write_bytes(trailing)), ParseError);

    CHECK_THROWS_AS(load_model(dir.file("missing.snet")), IoError);
}

TEST_CASE("non-composing layer records are an integrity error") {
    // Hand-built file: dense(2,3) followed by dense(4,1) parses cleanly but
    // cannot compose into a network.
    std::vector<std::uint8_t> bytes{'S', 'N', 'E', 'T'};
    auto u32 = [&bytes](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    auto f64_zero = [&bytes](std::size_t count) {
        bytes.insert(bytes.end(), count * 8, 0);
    };
    u32(1);  // version
    u32(2);  // layer count
    u32(1);  // dense
    u32(2);
    u32(3);
    f64_zero(2 * 3 + 3);
    u32(1);  // dense
    u32(4);
    u32(1);
    f64_zero(4 * 1 + 1);

    TempDir dir;
    const std::string path = dir.file("bad.snet");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_AS(load_model(path), IntegrityError);

    // Unknown layer kind tag is a parse error at that record's offset.
    bytes[12] = 42;
    std::ofstream out2(path, std::ios::binary | std::ios::trunc);
    out2.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    out2.close();
    try {
        load_model(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.byte_offset() == 12);
    }
}

TEST_CASE("assertion round-trip preserves exact f64 calibration bits") {
    TempDir dir;
    Rng rng(88);
    const AeSpec spec = build_ae(16, 5);
    Network ae = make_ae_network(spec, rng);
    Assertion assertion("relu3", std::move(ae));
    assertion.set_calibration(0.1234567890123456789, 0.3703703670370370367, 3.0000000000000004);

    const std::string path = dir.file("assert.snet");
    save_assertion(assertion, path);
    const Assertion loaded = load_assertion(path);

    CHECK(loaded.layer_name() == "relu3");
    CHECK(loaded.mean_loss() == assertion.mean_loss());
    CHECK(loaded.threshold() == assertion.threshold());
    CHECK(loaded.delta_at_calibration() == assertion.delta_at_calibration());
    for (std::size_t i = 0; i < loaded.ae().layers().size(); ++i) {
        CHECK(loaded.ae().layers()[i].weight == assertion.ae().layers()[i].weight);
    }
}

TEST_CASE("uncalibrated assertions round-trip as uncalibrated") {
    TempDir dir;
    Rng rng(88);
    Assertion assertion("relu1", make_ae_network(build_ae(8, 3), rng));
    assertion.set_mean_loss(0.5);
    const std::string path = dir.file("assert.snet");
    save_assertion(assertion, path);
    const Assertion loaded = load_assertion(path);
    CHECK(loaded.mean_loss() == 0.5);
    CHECK_FALSE(loaded.calibrated());
    CHECK_THROWS_AS(loaded.threshold(), StateError);
}
