#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "guardnet/tensor.hpp"

namespace guardnet {

/// Inputs with class labels, and optionally per-sample validity flags for
/// evaluation sets built by inject_invalid (true marks a truly invalid item).
struct LabeledDataset {
    std::vector<Tensor> inputs;
    std::vector<int> labels;
    std::vector<bool> validity_labels;  // empty unless this is an evaluation set

    std::size_t size() const { return inputs.size(); }
    bool has_validity_labels() const { return !validity_labels.empty(); }
};

/// Load an IDX image/label pair (the MNIST-family container: big-endian magic
/// 0x00000803 for images, 0x00000801 for labels, u8 payload). Pixels are
/// scaled to [0, 1] doubles; per-image shape comes from the header.
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Write a dataset of rank-2 images (values in [0, 1]) back to an IDX pair.
/// Loading a well-formed file and writing it back reproduces it byte-for-byte.
void write_idx(const LabeledDataset& data, const std::string& images_path,
               const std::string& labels_path);

/// Gaussian blobs with unit within-class stddev. The centroid of class k sits
/// at k * separation along axis 0 (see cluster_centroid), so adjacent classes
/// are `separation` stddevs apart. Samples are generated class-major and the
/// result is deterministic per rng seed.
LabeledDataset make_clusters(Rng& rng, std::size_t num_classes, std::size_t dim,
                             std::size_t samples_per_class, double separation);

/// Centroid used by make_clusters for the given class.
Tensor cluster_centroid(std::size_t class_index, std::size_t dim, double separation);

/// Replace floor(fraction * |valid_test|) positions of the valid set with
/// items from the invalid pool (sampled without replacement when the pool is
/// large enough) and flag the replaced positions in validity_labels.
LabeledDataset inject_invalid(const LabeledDataset& valid_test,
                              const LabeledDataset& invalid_pool, double fraction,
                              Rng& rng);

/// Center-crop or zero-pad a tensor to the target shape, dimension by
/// dimension. Used to coerce invalid-pool images onto the valid input shape.
Tensor center_crop_pad(const Tensor& input, const Shape& target_shape);

/// Provenance record for an IDX pair. sha256 covers the images file bytes
/// followed by the labels file bytes; paths are resolved relative to the
/// manifest's own directory when not absolute.
struct DatasetManifest {
    std::string images;
    std::string labels;
    std::string source;
    std::string sha256;
};

/// Build a manifest for an existing IDX pair, hashing the files.
DatasetManifest make_dataset_manifest(const std::string& images_path,
                                      const std::string& labels_path,
                                      const std::string& source);

void write_dataset_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest read_dataset_manifest(const std::string& path);

/// Load the IDX pair named by a manifest after verifying its checksum;
/// a hash mismatch is an integrity error.
LabeledDataset load_idx_from_manifest(const std::string& manifest_path);

/// Hex SHA-256 of a byte buffer.
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

}  // namespace guardnet
