#include "guardnet/calibration.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include <json.hpp>

namespace guardnet {

double compute_threshold(const std::vector<double>& losses, double delta) {
    if (losses.empty()) {
        throw DataError("compute_threshold: loss list is empty");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw DomainError("compute_threshold: delta must be finite and > 0");
    }
    double sum = 0.0;
    for (double loss : losses) {
        if (!std::isfinite(loss) || loss < 0.0) {
            throw DomainError("compute_threshold: losses must be finite and >= 0, got " +
                              std::to_string(loss));
        }
        sum += loss;
    }
    return delta * (sum / static_cast<double>(losses.size()));
}

CalibrationResult calibrate(std::vector<Assertion> assertions,
                            const std::vector<ActivationTrace>& traces,
                            const CalibrationConfig& cfg) {
    if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) {
        throw ConfigError("calibrate: delta must be finite and > 0");
    }
    if (traces.empty()) {
        throw DataError("calibrate: no traces supplied");
    }

    CalibrationResult result;
    result.report.delta = cfg.delta;
    for (Assertion& assertion : assertions) {
        std::vector<double> losses;
        losses.reserve(traces.size());
        for (std::size_t j = 0; j < traces.size(); ++j) {
            if (!traces[j].has(assertion.layer_name())) {
                throw DataError("calibrate: trace of sample " + std::to_string(j) +
                                " has no capture point " + assertion.layer_name());
            }
            const Tensor& ir = traces[j].at(assertion.layer_name());
            losses.push_back(mse(forward(assertion.ae(), ir), ir));
        }

        double sum = 0.0;
        for (double loss : losses) sum += loss;
        const double mean_loss = sum / static_cast<double>(losses.size());
        const double threshold = compute_threshold(losses, cfg.delta);
        assertion.set_calibration(mean_loss, threshold, cfg.delta);

        result.report.per_assertion.push_back(
            {assertion.layer_name(), mean_loss, threshold, traces.size()});
    }
    result.assertions = std::move(assertions);
    return result;
}

void write_calibration_report(const CalibrationReport& report, const std::string& path) {
    nlohmann::json doc;
    doc["delta"] = report.delta;
    doc["per_assertion"] = nlohmann::json::array();
    for (const AssertionCalibration& a : report.per_assertion) {
        doc["per_assertion"].push_back({{"layer", a.layer},
                                        {"mean_loss", a.mean_loss},
                                        {"threshold", a.threshold},
                                        {"m", a.sample_count}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out.good()) throw IoError("write failure on file: " + path);
}

CalibrationReport read_calibration_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file for reading: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("calibration report is not valid JSON: ") + e.what(),
                         e.byte);
    }
    CalibrationReport report;
    try {
        report.delta = doc.at("delta").get<double>();
        for (const auto& entry : doc.at("per_assertion")) {
            report.per_assertion.push_back({entry.at("layer").get<std::string>(),
                                            entry.at("mean_loss").get<double>(),
                                            entry.at("threshold").get<double>(),
                                            entry.at("m").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(std::string("calibration report missing fields: ") + e.what());
    }
    return report;
}

}  // namespace guardnet
