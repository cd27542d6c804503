#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "guardnet/data_io.hpp"
#include "guardnet/tensor.hpp"

namespace guardnet {

enum class LayerKind : std::uint32_t {
    dense = 1,
    relu = 2,
    conv2d = 3,
    maxpool2d = 4,
    flatten = 5,
};

const char* layer_kind_name(LayerKind kind);

/// One layer of a feed-forward stack. Parameters live inline:
///   dense:   weight (out_dim x in_dim), bias (out_dim)
///   conv2d:  weight (out_ch, in_ch, k, k), bias (out_ch); valid padding
///   maxpool: window/stride, no parameters
struct Layer {
    LayerKind kind = LayerKind::relu;

    std::size_t in_dim = 0, out_dim = 0;             // dense
    std::size_t in_ch = 0, out_ch = 0, kernel = 0;   // conv2d
    std::size_t window = 0;                          // maxpool2d
    std::size_t stride = 1;                          // conv2d / maxpool2d

    Tensor weight;
    Tensor bias;

    static Layer dense(std::size_t in_dim, std::size_t out_dim);
    static Layer relu();
    static Layer conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                        std::size_t stride = 1);
    static Layer maxpool2d(std::size_t window, std::size_t stride);
    static Layer flatten();

    bool has_parameters() const {
        return kind == LayerKind::dense || kind == LayerKind::conv2d;
    }
};

/// Ordered layer stack. Each position gets a unique auto-derived name
/// "<kind><position>" (dense0, relu1, ...) that capture points refer to.
class Network {
public:
    Network() = default;
    explicit Network(std::vector<Layer> layers);

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<std::string>& layer_names() const { return names_; }

    /// Index of the named layer; ConfigError if no layer has that name.
    std::size_t layer_index(const std::string& name) const;

    /// Output width of the final layer; the final layer must be dense.
    std::size_t num_classes() const;

private:
    std::vector<Layer> layers_;
    std::vector<std::string> names_;
};

/// Flattened activations captured at named layers for one input, in network
/// order, plus the final logits.
struct ActivationTrace {
    std::vector<std::string> capture_points;
    std::vector<Tensor> activations;  // parallel to capture_points, rank-1
    Tensor logits;

    bool has(const std::string& layer) const;
    const Tensor& at(const std::string& layer) const;  // DataError if missing
};

/// Output of a single layer applied to a single sample. `name` is used only
/// to label shape errors.
Tensor layer_forward(const Layer& layer, const Tensor& input,
                     const std::string& name = {});

struct LayerGradients {
    Tensor input;   // d loss / d input
    Tensor weight;  // empty for parameterless layers
    Tensor bias;
};

/// Gradients of a scalar loss through one layer, given the layer's input and
/// the loss gradient at its output.
LayerGradients layer_backward(const Layer& layer, const Tensor& input,
                              const Tensor& output_grad);

/// Run the network on one sample and return the logits. Pure: equal inputs
/// give bit-identical outputs.
Tensor forward(const Network& net, const Tensor& input);

/// Forward pass that additionally records the flattened output of each named
/// layer. The logits are bit-identical to forward(): capture never perturbs
/// the computation. Unknown capture names raise ConfigError.
std::pair<Tensor, ActivationTrace> forward_with_capture(
    const Network& net, const Tensor& input,
    const std::vector<std::string>& capture_points);

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 1e-2;
};

struct TrainResult {
    Network network;
    std::vector<double> loss_history;  // mean loss per epoch
    double final_accuracy = 0.0;       // training-set accuracy (classifier only)
};

/// Minibatch SGD with softmax-cross-entropy loss. Shuffling is a
/// deterministic permutation per epoch derived from (rng seed, epoch).
TrainResult train_classifier(Network net, const LabeledDataset& data,
                             const TrainConfig& cfg, Rng& rng);

/// Same SGD machinery with MSE loss against the input itself.
TrainResult train_autoencoder(Network net, const std::vector<Tensor>& inputs,
                              const TrainConfig& cfg, Rng& rng);

/// He initialization: weights ~ normal(0, sqrt(2 / fan_in)), biases zero.
void init_parameters(Network& net, Rng& rng);

/// Loss and, when dlogits is non-null, its gradient w.r.t. the logits.
double softmax_cross_entropy(const Tensor& logits, int label, Tensor* dlogits = nullptr);

/// Index of the largest logit; lowest index wins ties.
int argmax_class(const Tensor& logits);

/// Per-parameter gradients of one sample's loss, for the whole stack.
/// dweight/dbias entries are empty tensors for parameterless layers.
struct NetworkGradients {
    double loss = 0.0;
    std::vector<Tensor> dweight;
    std::vector<Tensor> dbias;
};

NetworkGradients classifier_gradients(const Network& net, const Tensor& input, int label);
NetworkGradients autoencoder_gradients(const Network& net, const Tensor& input);

/// Binary model container ("SNET", version, layer records with little-endian
/// f64 payloads). Round-trips are bit-exact.
void save_model(const Network& net, const std::string& path);
Network load_model(const std::string& path);

/// Buffer-level variants used by the assertion and bundle containers.
void serialize_network(std::vector<std::uint8_t>& out, const Network& net);
namespace wire { class Reader; }
Network parse_network(wire::Reader& reader);

}  // namespace guardnet
