#include "guardnet/assertion.hpp"

#include <cmath>
#include <utility>

#include "wire.hpp"

namespace guardnet {

AeSpec build_ae(std::size_t input_dim, std::size_t depth) {
    if (input_dim < 1) {
        throw ConfigError("build_ae: input_dim must be >= 1");
    }
    if (depth < 3 || depth % 2 == 0) {
        throw ConfigError("build_ae: depth must be odd and >= 3, got " +
                          std::to_string(depth));
    }
    AeSpec spec;
    spec.input_dim = input_dim;
    spec.depth = depth;
    spec.layer_widths.resize(depth);
    spec.layer_widths[0] = input_dim;
    for (std::size_t i = 0; i < depth / 2; ++i) {
        spec.layer_widths[i + 1] = std::max<std::size_t>(spec.layer_widths[i] / 2, 1);
    }
    for (std::size_t i = depth / 2 + 1; i < depth; ++i) {
        spec.layer_widths[i] = spec.layer_widths[depth - 1 - i];
    }
    return spec;
}

Network make_ae_network(const AeSpec& spec, Rng& rng) {
    if (spec.layer_widths.size() != spec.depth || spec.depth < 3) {
        throw ConfigError("make_ae_network: spec widths not derived; use build_ae");
    }
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < spec.depth; ++i) {
        layers.push_back(Layer::dense(spec.layer_widths[i], spec.layer_widths[i + 1]));
        if (i + 2 < spec.depth) layers.push_back(Layer::relu());
    }
    Network net(std::move(layers));
    init_parameters(net, rng);
    return net;
}

Assertion::Assertion(std::string layer_name, Network ae)
    : layer_name_(std::move(layer_name)), ae_(std::move(ae)) {
    if (ae_.layers().empty() || ae_.layers().front().kind != LayerKind::dense) {
        throw ConfigError("assertion AE must start with a dense layer");
    }
    if (ae_.layers().back().kind != LayerKind::dense ||
        ae_.layers().back().out_dim != ae_.layers().front().in_dim) {
        throw ConfigError("assertion AE output width must equal its input width");
    }
}

std::size_t Assertion::input_dim() const { return ae_.layers().front().in_dim; }

void Assertion::set_mean_loss(double mean_loss) {
    if (!(mean_loss >= 0.0) || !std::isfinite(mean_loss)) {
        throw NumericError("assertion mean loss must be finite and >= 0");
    }
    mean_loss_ = mean_loss;
}

double Assertion::threshold() const {
    if (!threshold_) {
        throw StateError("assertion on " + layer_name_ + " has no threshold yet; calibrate first");
    }
    return *threshold_;
}

double Assertion::delta_at_calibration() const {
    if (!threshold_) {
        throw StateError("assertion on " + layer_name_ + " has no threshold yet; calibrate first");
    }
    return delta_;
}

void Assertion::set_calibration(double mean_loss, double threshold, double delta) {
    set_mean_loss(mean_loss);
    // +inf is a legal degenerate threshold (nothing exceeds it); NaN is not.
    if (std::isnan(threshold) || threshold < 0.0) {
        throw NumericError("assertion threshold must be >= 0");
    }
    if (!(delta > 0.0)) {
        throw DomainError("assertion delta must be > 0");
    }
    threshold_ = threshold;
    delta_ = delta;
}

Assertion train_assertion(const AeSpec& spec, const std::string& layer_name,
                          const std::vector<Tensor>& activations,
                          const TrainConfig& cfg, Rng& rng) {
    if (activations.empty()) {
        throw DataError("train_assertion: no activations for layer " + layer_name);
    }
    for (std::size_t i = 0; i < activations.size(); ++i) {
        if (activations[i].rank() != 1 || activations[i].size() != spec.input_dim) {
            throw ShapeError("train_assertion: activation " + std::to_string(i) +
                             " has shape " + shape_to_string(activations[i].shape()) +
                             ", expected (" + std::to_string(spec.input_dim) + ")");
        }
    }

    Network ae = make_ae_network(spec, rng);
    TrainResult trained = train_autoencoder(std::move(ae), activations, cfg, rng);

    Assertion assertion(layer_name, std::move(trained.network));
    double loss_sum = 0.0;
    for (const Tensor& x : activations) {
        loss_sum += mse(forward(assertion.ae(), x), x);
    }
    const double mean_loss = loss_sum / static_cast<double>(activations.size());
    if (!std::isfinite(mean_loss)) {
        throw NumericError("train_assertion: non-finite mean reconstruction loss on " +
                           layer_name);
    }
    assertion.set_mean_loss(mean_loss);
    return assertion;
}

AssertionCheck assertion_check(const Tensor& ir, const Assertion& assertion) {
    const double threshold = assertion.threshold();
    if (ir.rank() != 1 || ir.size() != assertion.input_dim()) {
        throw ShapeError("assertion_check: intermediate result shape " +
                         shape_to_string(ir.shape()) + " does not match AE input (" +
                         std::to_string(assertion.input_dim()) + ")");
    }
    const Tensor reconstruction = forward(assertion.ae(), ir);
    AssertionCheck result;
    result.loss = mse(ir, reconstruction);
    result.passed = !(result.loss > threshold);
    return result;
}

void save_assertion(const Assertion& assertion, const std::string& path) {
    std::vector<std::uint8_t> bytes;
    serialize_network(bytes, assertion.ae());
    wire::put_string(bytes, assertion.layer_name());
    bytes.push_back(assertion.calibrated() ? 1 : 0);
    wire::put_f64le(bytes, assertion.mean_loss());
    wire::put_f64le(bytes, assertion.calibrated() ? assertion.threshold() : 0.0);
    wire::put_f64le(bytes, assertion.calibrated() ? assertion.delta_at_calibration() : 0.0);
    wire::write_file(path, bytes);
}

Assertion load_assertion(const std::string& path) {
    const std::vector<std::uint8_t> bytes = wire::read_file(path);
    wire::Reader reader(bytes);
    Network ae = parse_network(reader);
    const std::string layer_name = reader.string("assertion layer name");
    const std::uint8_t calibrated = reader.u8("assertion calibration flag");
    const double mean_loss = reader.f64le("assertion mean loss");
    const double threshold = reader.f64le("assertion threshold");
    const double delta = reader.f64le("assertion delta");
    if (!reader.at_end()) {
        throw ParseError("trailing bytes after assertion trailer", reader.offset());
    }
    if (calibrated > 1) {
        throw IntegrityError("assertion calibration flag must be 0 or 1");
    }

    Assertion assertion(layer_name, std::move(ae));
    assertion.set_mean_loss(mean_loss);
    if (calibrated == 1) {
        assertion.set_calibration(mean_loss, threshold, delta);
    }
    return assertion;
}

}  // namespace guardnet
