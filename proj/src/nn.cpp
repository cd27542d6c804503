#include "guardnet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>

namespace guardnet {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::relu: return "relu";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::flatten: return "flatten";
    }
    return "unknown";
}

Layer Layer::dense(std::size_t in_dim, std::size_t out_dim) {
    if (in_dim == 0 || out_dim == 0) {
        throw ConfigError("dense layer dimensions must be positive");
    }
    Layer l;
    l.kind = LayerKind::dense;
    l.in_dim = in_dim;
    l.out_dim = out_dim;
    l.weight = Tensor({out_dim, in_dim});
    l.bias = Tensor({out_dim});
    return l;
}

Layer Layer::relu() {
    Layer l;
    l.kind = LayerKind::relu;
    return l;
}

Layer Layer::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                    std::size_t stride) {
    if (in_ch == 0 || out_ch == 0 || kernel == 0 || stride == 0) {
        throw ConfigError("conv2d parameters must be positive");
    }
    Layer l;
    l.kind = LayerKind::conv2d;
    l.in_ch = in_ch;
    l.out_ch = out_ch;
    l.kernel = kernel;
    l.stride = stride;
    l.weight = Tensor({out_ch, in_ch, kernel, kernel});
    l.bias = Tensor({out_ch});
    return l;
}

Layer Layer::maxpool2d(std::size_t window, std::size_t stride) {
    if (window == 0 || stride == 0) {
        throw ConfigError("maxpool2d parameters must be positive");
    }
    Layer l;
    l.kind = LayerKind::maxpool2d;
    l.window = window;
    l.stride = stride;
    return l;
}

Layer Layer::flatten() {
    Layer l;
    l.kind = LayerKind::flatten;
    return l;
}

namespace {

ShapeError layer_shape_error(const std::string& name, const Layer& layer,
                             const std::string& detail) {
    const std::string label = name.empty() ? layer_kind_name(layer.kind) : name;
    return ShapeError(label + ": " + detail);
}

/// Validates the input shape for one layer and returns its output shape.
Shape layer_output_shape(const Layer& layer, const Shape& input,
                         const std::string& name) {
    switch (layer.kind) {
    case LayerKind::dense:
        if (input.size() != 1 || input[0] != layer.in_dim) {
            throw layer_shape_error(name, layer,
                                    "expected input shape (" + std::to_string(layer.in_dim) +
                                        "), got " + shape_to_string(input));
        }
        return {layer.out_dim};
    case LayerKind::relu:
        return input;
    case LayerKind::conv2d: {
        if (input.size() != 3 || input[0] != layer.in_ch) {
            throw layer_shape_error(name, layer,
                                    "expected rank-3 input with " +
                                        std::to_string(layer.in_ch) + " channels, got " +
                                        shape_to_string(input));
        }
        const std::size_t h = input[1], w = input[2];
        if (h < layer.kernel || w < layer.kernel) {
            throw layer_shape_error(name, layer,
                                    "input " + shape_to_string(input) +
                                        " is smaller than the " + std::to_string(layer.kernel) +
                                        "x" + std::to_string(layer.kernel) + " kernel");
        }
        return {layer.out_ch, (h - layer.kernel) / layer.stride + 1,
                (w - layer.kernel) / layer.stride + 1};
    }
    case LayerKind::maxpool2d: {
        if (input.size() != 3) {
            throw layer_shape_error(name, layer,
                                    "expected rank-3 input, got " + shape_to_string(input));
        }
        const std::size_t h = input[1], w = input[2];
        if (h < layer.window || w < layer.window) {
            throw layer_shape_error(name, layer,
                                    "input " + shape_to_string(input) +
                                        " is smaller than the " + std::to_string(layer.window) +
                                        "x" + std::to_string(layer.window) + " window");
        }
        return {input[0], (h - layer.window) / layer.stride + 1,
                (w - layer.window) / layer.stride + 1};
    }
    case LayerKind::flatten:
        return {shape_product(input)};
    }
    throw StateError("invalid layer kind");
}

}  // namespace

Network::Network(std::vector<Layer> layers) {
    if (layers.empty()) {
        throw ConfigError("network needs at least one layer");
    }
    layers_ = std::move(layers);
    names_.reserve(layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        names_.push_back(std::string(layer_kind_name(layers_[i].kind)) + std::to_string(i));
    }

    // Composition check where shapes are statically determined. Spatial
    // extents are unknown until the first dense layer pins a flat width.
    std::optional<Shape> shape;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& layer = layers_[i];
        if (shape) {
            shape = layer_output_shape(layer, *shape, names_[i]);
        } else if (layer.kind == LayerKind::dense) {
            shape = Shape{layer.out_dim};
        } else if (layer.kind == LayerKind::conv2d) {
            shape.reset();  // spatial dims depend on the input
        }
    }
}

std::size_t Network::layer_index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    throw ConfigError("unknown layer name: " + name);
}

std::size_t Network::num_classes() const {
    if (layers_.empty() || layers_.back().kind != LayerKind::dense) {
        throw StateError("num_classes requires a dense final layer");
    }
    return layers_.back().out_dim;
}

bool ActivationTrace::has(const std::string& layer) const {
    return std::find(capture_points.begin(), capture_points.end(), layer) !=
           capture_points.end();
}

const Tensor& ActivationTrace::at(const std::string& layer) const {
    for (std::size_t i = 0; i < capture_points.size(); ++i) {
        if (capture_points[i] == layer) return activations[i];
    }
    throw DataError("trace has no capture point named " + layer);
}

Tensor layer_forward(const Layer& layer, const Tensor& input, const std::string& name) {
    const Shape out_shape = layer_output_shape(layer, input.shape(), name);
    switch (layer.kind) {
    case LayerKind::dense: {
        Tensor out(out_shape);
        const std::size_t in = layer.in_dim, on = layer.out_dim;
        for (std::size_t o = 0; o < on; ++o) {
            double acc = layer.bias[o];
            const std::size_t row = o * in;
            for (std::size_t i = 0; i < in; ++i) acc += layer.weight[row + i] * input[i];
            out[o] = acc;
        }
        return out;
    }
    case LayerKind::relu: {
        Tensor out = input;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] < 0.0) out[i] = 0.0;
        }
        return out;
    }
    case LayerKind::conv2d: {
        Tensor out(out_shape);
        const std::size_t ic = layer.in_ch, oc = layer.out_ch, k = layer.kernel,
                          s = layer.stride;
        const std::size_t h = input.shape()[1], w = input.shape()[2];
        const std::size_t oh = out_shape[1], ow = out_shape[2];
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double acc = layer.bias[o];
                    for (std::size_t c = 0; c < ic; ++c) {
                        for (std::size_t ki = 0; ki < k; ++ki) {
                            const std::size_t in_base = (c * h + y * s + ki) * w + x * s;
                            const std::size_t w_base = ((o * ic + c) * k + ki) * k;
                            for (std::size_t kj = 0; kj < k; ++kj) {
                                acc += input[in_base + kj] * layer.weight[w_base + kj];
                            }
                        }
                    }
                    out[(o * oh + y) * ow + x] = acc;
                }
            }
        }
        return out;
    }
    case LayerKind::maxpool2d: {
        Tensor out(out_shape);
        const std::size_t ch = input.shape()[0], h = input.shape()[1], w = input.shape()[2];
        const std::size_t wd = layer.window, s = layer.stride;
        const std::size_t oh = out_shape[1], ow = out_shape[2];
        for (std::size_t c = 0; c < ch; ++c) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double best = input[(c * h + y * s) * w + x * s];
                    for (std::size_t wi = 0; wi < wd; ++wi) {
                        const std::size_t in_base = (c * h + y * s + wi) * w + x * s;
                        for (std::size_t wj = 0; wj < wd; ++wj) {
                            best = std::max(best, input[in_base + wj]);
                        }
                    }
                    out[(c * oh + y) * ow + x] = best;
                }
            }
        }
        return out;
    }
    case LayerKind::flatten:
        return input.flattened();
    }
    throw StateError("invalid layer kind");
}

LayerGradients layer_backward(const Layer& layer, const Tensor& input,
                              const Tensor& output_grad) {
    const Shape out_shape = layer_output_shape(layer, input.shape(), {});
    if (output_grad.shape() != out_shape) {
        throw ShapeError(std::string(layer_kind_name(layer.kind)) +
                         " backward: output grad shape " +
                         shape_to_string(output_grad.shape()) + " does not match " +
                         shape_to_string(out_shape));
    }

    LayerGradients g;
    switch (layer.kind) {
    case LayerKind::dense: {
        const std::size_t in = layer.in_dim, on = layer.out_dim;
        g.input = Tensor(input.shape());
        g.weight = Tensor(layer.weight.shape());
        g.bias = Tensor(layer.bias.shape());
        for (std::size_t o = 0; o < on; ++o) {
            const double dy = output_grad[o];
            const std::size_t row = o * in;
            g.bias[o] = dy;
            for (std::size_t i = 0; i < in; ++i) {
                g.weight[row + i] = dy * input[i];
                g.input[i] += dy * layer.weight[row + i];
            }
        }
        return g;
    }
    case LayerKind::relu: {
        g.input = Tensor(input.shape());
        for (std::size_t i = 0; i < input.size(); ++i) {
            g.input[i] = input[i] > 0.0 ? output_grad[i] : 0.0;
        }
        return g;
    }
    case LayerKind::conv2d: {
        const std::size_t ic = layer.in_ch, oc = layer.out_ch, k = layer.kernel,
                          s = layer.stride;
        const std::size_t h = input.shape()[1], w = input.shape()[2];
        const std::size_t oh = out_shape[1], ow = out_shape[2];
        g.input = Tensor(input.shape());
        g.weight = Tensor(layer.weight.shape());
        g.bias = Tensor(layer.bias.shape());
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    const double dy = output_grad[(o * oh + y) * ow + x];
                    g.bias[o] += dy;
                    for (std::size_t c = 0; c < ic; ++c) {
                        for (std::size_t ki = 0; ki < k; ++ki) {
                            const std::size_t in_base = (c * h + y * s + ki) * w + x * s;
                            const std::size_t w_base = ((o * ic + c) * k + ki) * k;
                            for (std::size_t kj = 0; kj < k; ++kj) {
                                g.weight[w_base + kj] += dy * input[in_base + kj];
                                g.input[in_base + kj] += dy * layer.weight[w_base + kj];
                            }
                        }
                    }
                }
            }
        }
        return g;
    }
    case LayerKind::maxpool2d: {
        const std::size_t ch = input.shape()[0], h = input.shape()[1], w = input.shape()[2];
        const std::size_t wd = layer.window, s = layer.stride;
        const std::size_t oh = out_shape[1], ow = out_shape[2];
        g.input = Tensor(input.shape());
        for (std::size_t c = 0; c < ch; ++c) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    // First maximum in row-major window order takes the gradient.
                    std::size_t best_idx = (c * h + y * s) * w + x * s;
                    double best = input[best_idx];
                    for (std::size_t wi = 0; wi < wd; ++wi) {
                        const std::size_t in_base = (c * h + y * s + wi) * w + x * s;
                        for (std::size_t wj = 0; wj < wd; ++wj) {
                            if (input[in_base + wj] > best) {
                                best = input[in_base + wj];
                                best_idx = in_base + wj;
                            }
                        }
                    }
                    g.input[best_idx] += output_grad[(c * oh + y) * ow + x];
                }
            }
        }
        return g;
    }
    case LayerKind::flatten:
        g.input = output_grad.reshaped(input.shape());
        return g;
    }
    throw StateError("invalid layer kind");
}

namespace {

struct ForwardCache {
    std::vector<Tensor> inputs;  // inputs[i] is what layer i consumed
    Tensor output;
};

ForwardCache run_forward_cached(const Network& net, const Tensor& input) {
    ForwardCache cache;
    cache.inputs.reserve(net.layers().size());
    Tensor current = input;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        Tensor next = layer_forward(net.layers()[i], current, net.layer_names()[i]);
        cache.inputs.push_back(std::move(current));
        current = std::move(next);
    }
    cache.output = std::move(current);
    return cache;
}

NetworkGradients backprop(const Network& net, const ForwardCache& cache, double loss,
                          Tensor output_grad) {
    const std::size_t n = net.layers().size();
    NetworkGradients grads;
    grads.loss = loss;
    grads.dweight.resize(n);
    grads.dbias.resize(n);
    Tensor upstream = std::move(output_grad);
    for (std::size_t i = n; i-- > 0;) {
        LayerGradients lg = layer_backward(net.layers()[i], cache.inputs[i], upstream);
        grads.dweight[i] = std::move(lg.weight);
        grads.dbias[i] = std::move(lg.bias);
        upstream = std::move(lg.input);
    }
    return grads;
}

}  // namespace

Tensor forward(const Network& net, const Tensor& input) {
    if (net.layers().empty()) {
        throw StateError("forward on an empty network");
    }
    Tensor current = input;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        current = layer_forward(net.layers()[i], current, net.layer_names()[i]);
    }
    return current;
}

std::pair<Tensor, ActivationTrace> forward_with_capture(
    const Network& net, const Tensor& input,
    const std::vector<std::string>& capture_points) {
    // Resolve names up front; unknown names are configuration mistakes.
    std::vector<std::size_t> indices;
    indices.reserve(capture_points.size());
    for (const std::string& name : capture_points) {
        indices.push_back(net.layer_index(name));
    }
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

    ActivationTrace trace;
    Tensor current = input;
    std::size_t next_capture = 0;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        current = layer_forward(net.layers()[i], current, net.layer_names()[i]);
        if (next_capture < indices.size() && indices[next_capture] == i) {
            trace.capture_points.push_back(net.layer_names()[i]);
            trace.activations.push_back(current.flattened());
            ++next_capture;
        }
    }
    trace.logits = current;
    return {std::move(current), std::move(trace)};
}

double softmax_cross_entropy(const Tensor& logits, int label, Tensor* dlogits) {
    if (logits.rank() != 1 || logits.empty()) {
        throw ShapeError("softmax_cross_entropy: logits must be rank-1, got " +
                         shape_to_string(logits.shape()));
    }
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
        throw DataError("label " + std::to_string(label) + " out of range [0, " +
                        std::to_string(logits.size()) + ")");
    }
    double max_logit = logits[0];
    for (std::size_t i = 1; i < logits.size(); ++i) max_logit = std::max(max_logit, logits[i]);
    double sum_exp = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum_exp += std::exp(logits[i] - max_logit);
    const double log_sum_exp = max_logit + std::log(sum_exp);
    const double loss = log_sum_exp - logits[static_cast<std::size_t>(label)];
    if (dlogits != nullptr) {
        *dlogits = Tensor(logits.shape());
        for (std::size_t i = 0; i < logits.size(); ++i) {
            (*dlogits)[i] = std::exp(logits[i] - log_sum_exp) -
                            (static_cast<std::size_t>(label) == i ? 1.0 : 0.0);
        }
    }
    return loss;
}

int argmax_class(const Tensor& logits) {
    if (logits.empty()) throw DomainError("argmax_class: empty logits");
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) best = i;
    }
    return static_cast<int>(best);
}

void init_parameters(Network& net, Rng& rng) {
    for (Layer& layer : net.layers()) {
        if (!layer.has_parameters()) continue;
        const std::size_t fan_in = layer.kind == LayerKind::dense
                                       ? layer.in_dim
                                       : layer.in_ch * layer.kernel * layer.kernel;
        const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (std::size_t i = 0; i < layer.weight.size(); ++i) {
            layer.weight[i] = rng.next_normal(0.0, stddev);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.0;
    }
}

NetworkGradients classifier_gradients(const Network& net, const Tensor& input, int label) {
    ForwardCache cache = run_forward_cached(net, input);
    Tensor dlogits;
    const double loss = softmax_cross_entropy(cache.output, label, &dlogits);
    return backprop(net, cache, loss, std::move(dlogits));
}

NetworkGradients autoencoder_gradients(const Network& net, const Tensor& input) {
    ForwardCache cache = run_forward_cached(net, input);
    if (!cache.output.same_shape(input)) {
        throw ShapeError("autoencoder output shape " +
                         shape_to_string(cache.output.shape()) +
                         " does not match input shape " + shape_to_string(input.shape()));
    }
    const double loss = mse(cache.output, input);
    Tensor dout(input.shape());
    const double scale = 2.0 / static_cast<double>(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        dout[i] = scale * (cache.output[i] - input[i]);
    }
    return backprop(net, cache, loss, std::move(dout));
}

namespace {

void check_train_config(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
        throw ConfigError("train: learning_rate must be finite and >= 0");
    }
}

using SampleGradFn = std::function<NetworkGradients(const Network&, std::size_t)>;

Network run_sgd(Network net, std::size_t sample_count, const TrainConfig& cfg, Rng& rng,
                const SampleGradFn& sample_gradients, std::vector<double>& loss_history) {
    const std::size_t layer_count = net.layers().size();
    std::vector<std::size_t> order(sample_count);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Deterministic permutation per epoch derived from (seed, epoch).
        Rng perm_rng = rng.split(epoch + 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i + 1 < sample_count; ++i) {
            const std::size_t j = i + perm_rng.next_below(sample_count - i);
            std::swap(order[i], order[j]);
        }

        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < sample_count; start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, sample_count);
            const std::size_t batch_n = end - start;

            std::vector<Tensor> weight_acc(layer_count), bias_acc(layer_count);
            double batch_loss = 0.0;
            for (std::size_t pos = start; pos < end; ++pos) {
                NetworkGradients grads = sample_gradients(net, order[pos]);
                batch_loss += grads.loss;
                for (std::size_t l = 0; l < layer_count; ++l) {
                    if (grads.dweight[l].empty()) continue;
                    if (weight_acc[l].empty()) {
                        weight_acc[l] = std::move(grads.dweight[l]);
                        bias_acc[l] = std::move(grads.dbias[l]);
                    } else {
                        for (std::size_t i = 0; i < weight_acc[l].size(); ++i) {
                            weight_acc[l][i] += grads.dweight[l][i];
                        }
                        for (std::size_t i = 0; i < bias_acc[l].size(); ++i) {
                            bias_acc[l][i] += grads.dbias[l][i];
                        }
                    }
                }
            }
            if (!std::isfinite(batch_loss)) {
                throw NumericError("non-finite training loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_index));
            }

            const double step = cfg.learning_rate / static_cast<double>(batch_n);
            for (std::size_t l = 0; l < layer_count; ++l) {
                if (weight_acc[l].empty()) continue;
                Layer& layer = net.layers()[l];
                for (std::size_t i = 0; i < layer.weight.size(); ++i) {
                    layer.weight[i] -= step * weight_acc[l][i];
                }
                for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                    layer.bias[i] -= step * bias_acc[l][i];
                }
            }

            epoch_loss += batch_loss;
            ++batch_index;
        }
        loss_history.push_back(epoch_loss / static_cast<double>(sample_count));
    }
    return net;
}

}  // namespace

TrainResult train_classifier(Network net, const LabeledDataset& data,
                             const TrainConfig& cfg, Rng& rng) {
    check_train_config(cfg);
    if (data.size() == 0) throw DataError("train_classifier: dataset is empty");
    if (data.labels.size() != data.inputs.size()) {
        throw DataError("train_classifier: " + std::to_string(data.inputs.size()) +
                        " inputs vs " + std::to_string(data.labels.size()) + " labels");
    }
    const std::size_t classes = net.num_classes();
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        if (data.labels[i] < 0 || static_cast<std::size_t>(data.labels[i]) >= classes) {
            throw DataError("label " + std::to_string(data.labels[i]) + " at sample " +
                            std::to_string(i) + " out of range [0, " +
                            std::to_string(classes) + ")");
        }
    }

    TrainResult result;
    result.network = run_sgd(
        std::move(net), data.size(), cfg, rng,
        [&data](const Network& n, std::size_t idx) {
            return classifier_gradients(n, data.inputs[idx], data.labels[idx]);
        },
        result.loss_history);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (argmax_class(forward(result.network, data.inputs[i])) == data.labels[i]) {
            ++correct;
        }
    }
    result.final_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return result;
}

TrainResult train_autoencoder(Network net, const std::vector<Tensor>& inputs,
                              const TrainConfig& cfg, Rng& rng) {
    check_train_config(cfg);
    if (inputs.empty()) throw DataError("train_autoencoder: no training inputs");

    TrainResult result;
    result.network = run_sgd(
        std::move(net), inputs.size(), cfg, rng,
        [&inputs](const Network& n, std::size_t idx) {
            return autoencoder_gradients(n, inputs[idx]);
        },
        result.loss_history);
    return result;
}

}  // namespace guardnet
