#include "guardnet/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <utility>

#include <json.hpp>

namespace guardnet {

namespace fs = std::filesystem;

GuardedModel::GuardedModel(Network net, std::vector<Assertion> assertions,
                           std::vector<std::string> capture_points, double delta)
    : net_(std::move(net)),
      capture_points_(std::move(capture_points)),
      delta_(delta) {
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
        throw ConfigError("guarded model delta must be finite and > 0");
    }
    std::set<std::string> seen;
    for (const std::string& name : capture_points_) {
        net_.layer_index(name);  // ConfigError on unknown names
        if (!seen.insert(name).second) {
            throw ConfigError("capture point listed twice: " + name);
        }
    }
    if (assertions.size() != capture_points_.size()) {
        throw ConfigError("expected one assertion per capture point, got " +
                          std::to_string(assertions.size()) + " assertions for " +
                          std::to_string(capture_points_.size()) + " capture points");
    }

    // Store assertions in capture-point order.
    assertions_.reserve(assertions.size());
    for (const std::string& name : capture_points_) {
        auto it = std::find_if(assertions.begin(), assertions.end(),
                               [&name](const Assertion& a) { return a.layer_name() == name; });
        if (it == assertions.end()) {
            throw ConfigError("no assertion bound to capture point " + name);
        }
        assertions_.push_back(std::move(*it));
        assertions.erase(it);
    }
}

Verdict GuardedModel::verify_input(const Tensor& input) const {
    auto [logits, trace] = forward_with_capture(net_, input, capture_points_);

    Verdict verdict;
    verdict.logits = std::move(logits);
    verdict.predicted_class = argmax_class(verdict.logits);
    verdict.per_assertion.reserve(assertions_.size());

    double score = 0.0;
    for (const Assertion& assertion : assertions_) {
        const Tensor& ir = trace.at(assertion.layer_name());
        const AssertionCheck check = assertion_check(ir, assertion);
        verdict.per_assertion.push_back(
            {assertion.layer_name(), check.loss, assertion.threshold(), check.passed});
        if (!check.passed) verdict.validity = false;

        double ratio;
        if (assertion.mean_loss() == 0.0) {
            ratio = check.loss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        } else {
            ratio = check.loss / assertion.mean_loss();
        }
        score = std::max(score, ratio);
    }
    verdict.anomaly_score = assertions_.empty() ? 0.0 : score;
    return verdict;
}

double GuardedModel::anomaly_score(const Tensor& input) const {
    return verify_input(input).anomaly_score;
}

std::vector<std::string> default_capture_points(const Network& net) {
    const auto& layers = net.layers();
    const auto& names = net.layer_names();
    std::vector<std::string> candidates;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        if (layers[i + 1].kind != LayerKind::relu) {
            candidates.push_back(names[i]);
        }
    }
    if (candidates.size() > 2) {
        candidates.erase(candidates.begin(), candidates.end() - 2);
    }
    return candidates;
}

namespace {

constexpr int kBundleFormatVersion = 1;

std::string assertion_file_name(const std::string& layer) {
    return "assertion_" + layer + ".snet";
}

}  // namespace

void save_bundle(const GuardedModel& model, const CalibrationReport& report,
                 const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);

    save_model(model.network(), (base / "model.snet").string());
    for (const Assertion& assertion : model.assertions()) {
        save_assertion(assertion, (base / assertion_file_name(assertion.layer_name())).string());
    }
    write_calibration_report(report, (base / "calibration.json").string());

    nlohmann::json manifest;
    manifest["format_version"] = kBundleFormatVersion;
    manifest["capture_points"] = model.capture_points();
    manifest["delta"] = model.delta();
    manifest["model_file"] = "model.snet";
    nlohmann::json files = nlohmann::json::object();
    for (const std::string& layer : model.capture_points()) {
        files[layer] = assertion_file_name(layer);
    }
    manifest["assertion_files"] = files;

    std::ofstream out(base / "manifest.json");
    if (!out) throw IoError("cannot open file for writing: " + (base / "manifest.json").string());
    out << manifest.dump(2) << '\n';
    if (!out.good()) throw IoError("write failure on manifest in " + dir);
}

LoadedBundle load_bundle(const std::string& dir) {
    const fs::path base(dir);
    const fs::path manifest_path = base / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open bundle manifest: " + manifest_path.string());

    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("bundle manifest is not valid JSON: ") + e.what(), e.byte);
    }

    int version = 0;
    std::vector<std::string> capture_points;
    double delta = 0.0;
    std::string model_file;
    try {
        version = manifest.at("format_version").get<int>();
        capture_points = manifest.at("capture_points").get<std::vector<std::string>>();
        delta = manifest.at("delta").get<double>();
        model_file = manifest.value("model_file", std::string("model.snet"));
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(std::string("bundle manifest missing fields: ") + e.what());
    }
    if (version != kBundleFormatVersion) {
        throw FormatError("unsupported bundle format version " + std::to_string(version) +
                              " (supported: " + std::to_string(kBundleFormatVersion) + ")",
                          0);
    }

    Network net = load_model((base / model_file).string());
    std::vector<Assertion> assertions;
    assertions.reserve(capture_points.size());
    for (const std::string& layer : capture_points) {
        std::string file = assertion_file_name(layer);
        if (manifest.contains("assertion_files")) {
            file = manifest["assertion_files"].value(layer, file);
        }
        Assertion assertion = load_assertion((base / file).string());
        if (assertion.layer_name() != layer) {
            throw IntegrityError("assertion file " + file + " is bound to layer " +
                                 assertion.layer_name() + ", expected " + layer);
        }
        assertions.push_back(std::move(assertion));
    }

    CalibrationReport report;
    if (fs::exists(base / "calibration.json")) {
        report = read_calibration_report((base / "calibration.json").string());
    }
    return {GuardedModel(std::move(net), std::move(assertions), std::move(capture_points), delta),
            std::move(report)};
}

}  // namespace guardnet
