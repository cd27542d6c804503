#include "guardnet/data_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "wire.hpp"

namespace guardnet {

namespace wire {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on file: " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw IoError("write failure on file: " + path);
}

}  // namespace wire

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803u;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801u;

}  // namespace

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto image_bytes = wire::read_file(images_path);
    const auto label_bytes = wire::read_file(labels_path);

    wire::Reader images(image_bytes);
    const std::uint32_t image_magic = images.u32be("image magic");
    if (image_magic != kIdxImagesMagic) {
        throw FormatError("bad IDX image magic in " + images_path, 0);
    }
    const std::uint32_t image_count = images.u32be("image count");
    const std::uint32_t rows = images.u32be("image rows");
    const std::uint32_t cols = images.u32be("image cols");
    if (rows == 0 || cols == 0) {
        throw IntegrityError("IDX image dimensions are zero in " + images_path);
    }

    wire::Reader labels(label_bytes);
    const std::uint32_t label_magic = labels.u32be("label magic");
    if (label_magic != kIdxLabelsMagic) {
        throw FormatError("bad IDX label magic in " + labels_path, 0);
    }
    const std::uint32_t label_count = labels.u32be("label count");
    if (label_count != image_count) {
        throw IntegrityError("IDX count mismatch: " + std::to_string(image_count) +
                             " images vs " + std::to_string(label_count) + " labels");
    }

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    images.require(static_cast<std::size_t>(image_count) * pixels, "image payload");
    labels.require(image_count, "label payload");

    LabeledDataset out;
    out.inputs.reserve(image_count);
    out.labels.reserve(image_count);
    std::vector<std::uint8_t> raw(pixels);
    for (std::uint32_t i = 0; i < image_count; ++i) {
        images.bytes(raw.data(), pixels, "image payload");
        std::vector<double> values(pixels);
        for (std::size_t p = 0; p < pixels; ++p) values[p] = raw[p] / 255.0;
        out.inputs.emplace_back(Shape{rows, cols}, std::move(values));
        out.labels.push_back(labels.u8("label payload"));
    }
    return out;
}

void write_idx(const LabeledDataset& data, const std::string& images_path,
               const std::string& labels_path) {
    if (data.inputs.empty()) throw DataError("write_idx: dataset is empty");
    const Shape& shape = data.inputs.front().shape();
    if (shape.size() != 2) {
        throw DataError("write_idx: expected rank-2 images, got shape " +
                        shape_to_string(shape));
    }
    if (data.labels.size() != data.inputs.size()) {
        throw IntegrityError("write_idx: " + std::to_string(data.inputs.size()) +
                             " inputs vs " + std::to_string(data.labels.size()) +
                             " labels");
    }

    std::vector<std::uint8_t> image_bytes;
    wire::put_u32be(image_bytes, kIdxImagesMagic);
    wire::put_u32be(image_bytes, static_cast<std::uint32_t>(data.inputs.size()));
    wire::put_u32be(image_bytes, static_cast<std::uint32_t>(shape[0]));
    wire::put_u32be(image_bytes, static_cast<std::uint32_t>(shape[1]));

    std::vector<std::uint8_t> label_bytes;
    wire::put_u32be(label_bytes, kIdxLabelsMagic);
    wire::put_u32be(label_bytes, static_cast<std::uint32_t>(data.labels.size()));

    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        const Tensor& img = data.inputs[i];
        if (img.shape() != shape) {
            throw ShapeError("write_idx: image " + std::to_string(i) + " has shape " +
                             shape_to_string(img.shape()) + ", expected " +
                             shape_to_string(shape));
        }
        for (std::size_t p = 0; p < img.size(); ++p) {
            const double scaled = std::round(img[p] * 255.0);
            image_bytes.push_back(static_cast<std::uint8_t>(
                std::clamp(scaled, 0.0, 255.0)));
        }
        label_bytes.push_back(static_cast<std::uint8_t>(data.labels[i] & 0xFF));
    }

    wire::write_file(images_path, image_bytes);
    wire::write_file(labels_path, label_bytes);
}

Tensor cluster_centroid(std::size_t class_index, std::size_t dim, double separation) {
    Tensor centroid({dim});
    centroid[0] = static_cast<double>(class_index) * separation;
    return centroid;
}

LabeledDataset make_clusters(Rng& rng, std::size_t num_classes, std::size_t dim,
                             std::size_t samples_per_class, double separation) {
    if (num_classes < 1 || samples_per_class < 1) {
        throw ConfigError("make_clusters: counts must be >= 1");
    }
    if (dim < 2) {
        throw ConfigError("make_clusters: dim must be >= 2, got " + std::to_string(dim));
    }
    if (!(separation > 0.0)) {
        throw ConfigError("make_clusters: separation must be > 0");
    }

    LabeledDataset out;
    out.inputs.reserve(num_classes * samples_per_class);
    out.labels.reserve(num_classes * samples_per_class);
    for (std::size_t k = 0; k < num_classes; ++k) {
        const Tensor centroid = cluster_centroid(k, dim, separation);
        for (std::size_t s = 0; s < samples_per_class; ++s) {
            Tensor sample({dim});
            for (std::size_t d = 0; d < dim; ++d) {
                sample[d] = centroid[d] + rng.next_normal(0.0, 1.0);
            }
            out.inputs.push_back(std::move(sample));
            out.labels.push_back(static_cast<int>(k));
        }
    }
    return out;
}

LabeledDataset inject_invalid(const LabeledDataset& valid_test,
                              const LabeledDataset& invalid_pool, double fraction,
                              Rng& rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("inject_invalid: fraction must be in (0, 1), got " +
                          std::to_string(fraction));
    }
    if (invalid_pool.size() == 0) {
        throw DataError("inject_invalid: invalid pool is empty");
    }
    if (valid_test.size() == 0) {
        throw DataError("inject_invalid: valid test set is empty");
    }
    const Shape& valid_shape = valid_test.inputs.front().shape();
    for (const Tensor& t : invalid_pool.inputs) {
        if (t.shape() != valid_shape) {
            throw ShapeError("inject_invalid: pool item shape " +
                             shape_to_string(t.shape()) + " does not match valid shape " +
                             shape_to_string(valid_shape));
        }
    }

    const std::size_t n = valid_test.size();
    const std::size_t count = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(n)));

    LabeledDataset out = valid_test;
    out.validity_labels.assign(n, false);
    if (count == 0) return out;

    // Partial Fisher-Yates to choose `count` distinct positions.
    std::vector<std::size_t> positions(n);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.next_below(n - i);
        std::swap(positions[i], positions[j]);
    }

    std::vector<std::size_t> picks;
    picks.reserve(count);
    const std::size_t pool_size = invalid_pool.size();
    if (pool_size >= count) {
        std::vector<std::size_t> pool_indices(pool_size);
        std::iota(pool_indices.begin(), pool_indices.end(), std::size_t{0});
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + rng.next_below(pool_size - i);
            std::swap(pool_indices[i], pool_indices[j]);
            picks.push_back(pool_indices[i]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) picks.push_back(rng.next_below(pool_size));
    }

    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t pos = positions[i];
        const std::size_t src = picks[i];
        out.inputs[pos] = invalid_pool.inputs[src];
        out.labels[pos] = invalid_pool.labels[src];
        out.validity_labels[pos] = true;
    }
    return out;
}

namespace {

// SHA-256 (FIPS 180-4), straight scalar implementation.
class Sha256 {
public:
    void update(const std::uint8_t* data, std::size_t len) {
        total_ += len;
        while (len > 0) {
            const std::size_t take = std::min(len, std::size_t{64} - buffer_len_);
            std::copy(data, data + take, buffer_.begin() + buffer_len_);
            buffer_len_ += take;
            data += take;
            len -= take;
            if (buffer_len_ == 64) {
                compress(buffer_.data());
                buffer_len_ = 0;
            }
        }
    }

    std::string hex_digest() {
        const std::uint64_t bit_len = total_ * 8;
        std::uint8_t pad = 0x80;
        update(&pad, 1);
        const std::uint8_t zero = 0;
        while (buffer_len_ != 56) update(&zero, 1);
        std::array<std::uint8_t, 8> len_bytes;
        for (int i = 0; i < 8; ++i) {
            len_bytes[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>(bit_len >> (56 - 8 * i));
        }
        update(len_bytes.data(), 8);

        std::ostringstream out;
        out << std::hex << std::setfill('0');
        for (std::uint32_t word : state_) out << std::setw(8) << word;
        return out.str();
    }

private:
    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const std::uint8_t* block) {
        static constexpr std::array<std::uint32_t, 64> k{
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

        std::array<std::uint32_t, 64> w;
        for (int i = 0; i < 16; ++i) {
            w[static_cast<std::size_t>(i)] =
                (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        }
        for (std::size_t i = 16; i < 64; ++i) {
            const std::uint32_t s0 =
                rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 =
                rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }

        auto [a, b, c, d, e, f, g, h] = state_;
        for (std::size_t i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t temp1 = h + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t temp2 = s0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + temp1;
            d = c;
            c = b;
            b = a;
            a = temp1 + temp2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_{0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffer_len_ = 0;
    std::uint64_t total_ = 0;
};

std::string hash_idx_pair(const std::string& images_path, const std::string& labels_path) {
    Sha256 hasher;
    const auto image_bytes = wire::read_file(images_path);
    hasher.update(image_bytes.data(), image_bytes.size());
    const auto label_bytes = wire::read_file(labels_path);
    hasher.update(label_bytes.data(), label_bytes.size());
    return hasher.hex_digest();
}

std::string resolve_relative(const std::string& base_file, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_file).parent_path() / p).string();
}

}  // namespace

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
    Sha256 hasher;
    hasher.update(bytes.data(), bytes.size());
    return hasher.hex_digest();
}

DatasetManifest make_dataset_manifest(const std::string& images_path,
                                      const std::string& labels_path,
                                      const std::string& source) {
    return {images_path, labels_path, source, hash_idx_pair(images_path, labels_path)};
}

void write_dataset_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json doc;
    doc["images"] = manifest.images;
    doc["labels"] = manifest.labels;
    doc["source"] = manifest.source;
    doc["sha256"] = manifest.sha256;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out.good()) throw IoError("write failure on file: " + path);
}

DatasetManifest read_dataset_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file for reading: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("dataset manifest is not valid JSON: ") + e.what(),
                         e.byte);
    }
    try {
        return {doc.at("images").get<std::string>(), doc.at("labels").get<std::string>(),
                doc.at("source").get<std::string>(), doc.at("sha256").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(std::string("dataset manifest missing fields: ") + e.what());
    }
}

LabeledDataset load_idx_from_manifest(const std::string& manifest_path) {
    const DatasetManifest manifest = read_dataset_manifest(manifest_path);
    const std::string images = resolve_relative(manifest_path, manifest.images);
    const std::string labels = resolve_relative(manifest_path, manifest.labels);
    const std::string actual = hash_idx_pair(images, labels);
    if (actual != manifest.sha256) {
        throw IntegrityError("dataset checksum mismatch for " + manifest_path +
                             ": manifest says " + manifest.sha256 + ", files hash to " +
                             actual);
    }
    return load_idx(images, labels);
}

Tensor center_crop_pad(const Tensor& input, const Shape& target_shape) {
    if (input.rank() != target_shape.size()) {
        throw ShapeError("center_crop_pad: rank of " + shape_to_string(input.shape()) +
                         " does not match target " + shape_to_string(target_shape));
    }
    Tensor out(target_shape);
    const std::size_t rank = input.rank();
    if (rank == 0) return out;

    // Per-dimension source/destination start offsets for a centered window.
    std::vector<std::size_t> copy_len(rank), src_start(rank), dst_start(rank);
    for (std::size_t d = 0; d < rank; ++d) {
        const std::size_t in_len = input.shape()[d];
        const std::size_t out_len = target_shape[d];
        copy_len[d] = std::min(in_len, out_len);
        src_start[d] = (in_len - copy_len[d]) / 2;
        dst_start[d] = (out_len - copy_len[d]) / 2;
    }

    std::vector<std::size_t> in_stride(rank, 1), out_stride(rank, 1);
    for (std::size_t d = rank - 1; d > 0; --d) {
        in_stride[d - 1] = in_stride[d] * input.shape()[d];
        out_stride[d - 1] = out_stride[d] * target_shape[d];
    }

    std::vector<std::size_t> idx(rank, 0);
    while (true) {
        std::size_t src = 0, dst = 0;
        for (std::size_t d = 0; d < rank; ++d) {
            src += (src_start[d] + idx[d]) * in_stride[d];
            dst += (dst_start[d] + idx[d]) * out_stride[d];
        }
        out[dst] = input[src];

        std::size_t d = rank;
        while (d > 0) {
            --d;
            if (++idx[d] < copy_len[d]) break;
            idx[d] = 0;
            if (d == 0) return out;
        }
    }
}

}  // namespace guardnet
