#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "guardnet/assertion.hpp"
#include "guardnet/nn.hpp"

namespace guardnet {

/// Shared scale coefficient and the capture points it applies to. One delta
/// serves every assertion; the practical band is [2, 4] with 3 as default.
struct CalibrationConfig {
    double delta = 3.0;
    std::vector<std::string> capture_points;
};

/// Threshold formula: delta * mean(losses). Losses must be finite and >= 0.
double compute_threshold(const std::vector<double>& losses, double delta);

struct AssertionCalibration {
    std::string layer;
    double mean_loss = 0.0;
    double threshold = 0.0;
    std::size_t sample_count = 0;
};

struct CalibrationReport {
    double delta = 0.0;
    std::vector<AssertionCalibration> per_assertion;
};

struct CalibrationResult {
    std::vector<Assertion> assertions;
    CalibrationReport report;
};

/// Set every assertion's threshold from the reconstruction losses of the
/// training-set traces: mean_loss is the mean MSE over all samples at the
/// assertion's capture point, threshold = delta * mean_loss. AE parameters
/// are left untouched.
CalibrationResult calibrate(std::vector<Assertion> assertions,
                            const std::vector<ActivationTrace>& traces,
                            const CalibrationConfig& cfg);

void write_calibration_report(const CalibrationReport& report, const std::string& path);
CalibrationReport read_calibration_report(const std::string& path);

}  // namespace guardnet
