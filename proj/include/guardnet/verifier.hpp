#pragma once

#include <string>
#include <vector>

#include "guardnet/assertion.hpp"
#include "guardnet/calibration.hpp"
#include "guardnet/nn.hpp"

namespace guardnet {

struct AssertionResult {
    std::string layer;
    double loss = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

/// Outcome of one guarded inference: the unmodified classification plus the
/// validity verdict. validity is true iff every assertion passed; the
/// anomaly score is max(loss / mean_loss) over assertions (0 when there are
/// none), so validity <=> anomaly_score <= delta whenever no mean loss is 0.
struct Verdict {
    bool validity = true;
    Tensor logits;
    int predicted_class = 0;
    std::vector<AssertionResult> per_assertion;
    double anomaly_score = 0.0;
};

/// The deployable unit: a network, its calibrated assertions in capture-point
/// order, and the shared delta. Immutable after construction; verification is
/// pure and safe to run concurrently.
class GuardedModel {
public:
    GuardedModel(Network net, std::vector<Assertion> assertions,
                 std::vector<std::string> capture_points, double delta);

    const Network& network() const { return net_; }
    const std::vector<Assertion>& assertions() const { return assertions_; }
    const std::vector<std::string>& capture_points() const { return capture_points_; }
    double delta() const { return delta_; }

    /// Classify the input and check every assertion. The logits are
    /// bit-identical to forward(network(), input): guarding never touches
    /// the model's own computation. All assertions are evaluated even after
    /// a failure so the verdict carries full per-layer diagnostics.
    Verdict verify_input(const Tensor& input) const;

    /// Max over assertions of reconstruction loss divided by that
    /// assertion's mean training loss. A zero mean loss contributes +inf
    /// when its loss is positive and 0 when the loss is 0 too.
    double anomaly_score(const Tensor& input) const;

private:
    Network net_;
    std::vector<Assertion> assertions_;
    std::vector<std::string> capture_points_;
    double delta_ = 0.0;
};

/// Default capture-point rule: the last two layers whose output is a settled
/// activation (not immediately refined by a relu), skipping the final layer.
/// For a dense/relu MLP this selects the last two hidden relu outputs.
std::vector<std::string> default_capture_points(const Network& net);

/// Bundle directory layout: manifest.json {capture_points, delta,
/// format_version}, model.snet, assertion_<layer>.snet per capture point,
/// and calibration.json.
void save_bundle(const GuardedModel& model, const CalibrationReport& report,
                 const std::string& dir);

struct LoadedBundle {
    GuardedModel model;
    CalibrationReport report;
};

LoadedBundle load_bundle(const std::string& dir);

}  // namespace guardnet
