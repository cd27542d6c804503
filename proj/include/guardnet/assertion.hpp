#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "guardnet/nn.hpp"
#include "guardnet/tensor.hpp"

namespace guardnet {

/// Shape plan for an auto-built AutoEncoder. Widths run from input_dim down
/// to the bottleneck (halving, floored, clamped at 1) and mirror back up:
/// depth 5 on 64 inputs gives [64, 32, 16, 32, 64].
struct AeSpec {
    std::size_t input_dim = 0;
    std::size_t depth = 5;
    std::vector<std::size_t> layer_widths;
};

/// Derive the width chain for the given input size. Depth counts widths, so
/// a depth-5 spec has 4 weight layers; depth must be odd and >= 3.
AeSpec build_ae(std::size_t input_dim, std::size_t depth = 5);

/// Materialize the spec as a dense/relu stack with a linear output layer,
/// parameters initialized from the rng.
Network make_ae_network(const AeSpec& spec, Rng& rng);

/// An AutoEncoder bound to one capture point, plus its calibration state.
/// mean_loss is the mean reconstruction MSE over the training activations;
/// the threshold stays unset until calibration fixes it at delta * mean_loss.
class Assertion {
public:
    Assertion(std::string layer_name, Network ae);

    const std::string& layer_name() const { return layer_name_; }
    const Network& ae() const { return ae_; }
    Network& ae() { return ae_; }

    /// Width of the AE's input layer (== the capture point's flattened length).
    std::size_t input_dim() const;

    double mean_loss() const { return mean_loss_; }
    void set_mean_loss(double mean_loss);

    bool calibrated() const { return threshold_.has_value(); }
    double threshold() const;              // StateError when uncalibrated
    double delta_at_calibration() const;   // StateError when uncalibrated
    void set_calibration(double mean_loss, double threshold, double delta);

private:
    std::string layer_name_;
    Network ae_;
    double mean_loss_ = 0.0;
    std::optional<double> threshold_;
    double delta_ = 0.0;
};

/// Build and train an AE on the given activations (each of length
/// spec.input_dim), then record the post-training mean reconstruction loss
/// over the same activations in one deterministic pass. The returned
/// assertion has no threshold yet.
Assertion train_assertion(const AeSpec& spec, const std::string& layer_name,
                          const std::vector<Tensor>& activations,
                          const TrainConfig& cfg, Rng& rng);

struct AssertionCheck {
    bool passed = false;
    double loss = 0.0;
};

/// Reconstruct the intermediate result through the assertion's AE and compare
/// the MSE loss against the threshold. Fails only on loss strictly greater
/// than the threshold; a loss exactly at the threshold passes.
AssertionCheck assertion_check(const Tensor& ir, const Assertion& assertion);

/// Assertion container: the AE in model format plus a trailer carrying
/// {layer_name, mean_loss, threshold, delta}; f64 bit patterns round-trip
/// exactly.
void save_assertion(const Assertion& assertion, const std::string& path);
Assertion load_assertion(const std::string& path);

}  // namespace guardnet
