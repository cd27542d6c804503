// guardnet command-line pipeline: train the target model, fit and calibrate
// AutoEncoder assertions, check single inputs, and evaluate detection quality.
//
// Exit codes: 0 success (or valid input), 1 invalid input (check only),
// 2 usage/config error, 3 runtime/numeric error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "guardnet/assertion.hpp"
#include "guardnet/calibration.hpp"
#include "guardnet/data_io.hpp"
#include "guardnet/metrics.hpp"
#include "guardnet/nn.hpp"
#include "guardnet/tensor.hpp"
#include "guardnet/verifier.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace guardnet;

namespace {

// ---------------------------------------------------------------------------
// Config plumbing. Every error names the offending field path.

const json& need(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError("missing config field: " + path);
    }
    return obj.at(key);
}

template <typename T>
T as(const json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for config field: " + path);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return as<T>(obj.at(key), path);
}

struct DatasetSpec {
    std::string field;  // config path, for error messages
    std::string kind;
    std::string images, labels;                       // idx
    std::string manifest;                             // manifest
    std::size_t num_classes = 0, dim = 0, samples_per_class = 0;  // clusters
    double separation = 0.0;
    std::vector<double> offset;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    Shape input_shape;  // empty: keep dataset shapes as loaded
    std::vector<Layer> layers;
    TrainConfig train{30, 32, 1e-2};
    std::size_t ae_depth = 5;
    TrainConfig ae_train{30, 32, 1e-2};
    bool capture_auto = true;
    std::vector<std::string> capture_points;
    double delta = 3.0;
    std::optional<DatasetSpec> data_train, data_test, data_invalid;
};

Layer parse_layer(const json& spec, const std::string& path) {
    const std::string kind = as<std::string>(need(spec, "kind", path + ".kind"), path + ".kind");
    if (kind == "dense") {
        return Layer::dense(as<std::size_t>(need(spec, "in", path + ".in"), path + ".in"),
                            as<std::size_t>(need(spec, "out", path + ".out"), path + ".out"));
    }
    if (kind == "relu") return Layer::relu();
    if (kind == "flatten") return Layer::flatten();
    if (kind == "conv2d") {
        return Layer::conv2d(
            as<std::size_t>(need(spec, "in_ch", path + ".in_ch"), path + ".in_ch"),
            as<std::size_t>(need(spec, "out_ch", path + ".out_ch"), path + ".out_ch"),
            as<std::size_t>(need(spec, "kernel", path + ".kernel"), path + ".kernel"),
            get_or<std::size_t>(spec, "stride", path + ".stride", 1));
    }
    if (kind == "maxpool2d") {
        return Layer::maxpool2d(
            as<std::size_t>(need(spec, "window", path + ".window"), path + ".window"),
            as<std::size_t>(need(spec, "stride", path + ".stride"), path + ".stride"));
    }
    throw ConfigError("unknown layer kind \"" + kind + "\" at " + path + ".kind");
}

DatasetSpec parse_dataset(const json& spec, const std::string& path) {
    DatasetSpec out;
    out.field = path;
    out.kind = as<std::string>(need(spec, "kind", path + ".kind"), path + ".kind");
    if (out.kind == "idx") {
        out.images = as<std::string>(need(spec, "images", path + ".images"), path + ".images");
        out.labels = as<std::string>(need(spec, "labels", path + ".labels"), path + ".labels");
    } else if (out.kind == "manifest") {
        out.manifest = as<std::string>(need(spec, "path", path + ".path"), path + ".path");
    } else if (out.kind == "clusters") {
        out.num_classes = as<std::size_t>(need(spec, "num_classes", path + ".num_classes"),
                                          path + ".num_classes");
        out.dim = as<std::size_t>(need(spec, "dim", path + ".dim"), path + ".dim");
        out.samples_per_class = as<std::size_t>(
            need(spec, "samples_per_class", path + ".samples_per_class"),
            path + ".samples_per_class");
        out.separation = as<double>(need(spec, "separation", path + ".separation"),
                                    path + ".separation");
        out.offset = get_or<std::vector<double>>(spec, "offset", path + ".offset", {});
    } else {
        throw ConfigError("unknown dataset kind \"" + out.kind + "\" at " + path + ".kind");
    }
    return out;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }

    PipelineConfig cfg;
    cfg.seed = get_or<std::uint64_t>(doc, "seed", "seed", 0);
    cfg.out_dir = get_or<std::string>(doc, "out_dir", "out_dir", "out");
    cfg.delta = get_or<double>(doc, "delta", "delta", 3.0);
    if (!(cfg.delta > 0.0)) throw ConfigError("delta must be > 0 at field: delta");

    const json& model = need(doc, "model", "model");
    if (model.contains("input_shape")) {
        cfg.input_shape = as<Shape>(model.at("input_shape"), "model.input_shape");
    }
    const json& layers = need(model, "layers", "model.layers");
    if (!layers.is_array() || layers.empty()) {
        throw ConfigError("model.layers must be a non-empty array");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        cfg.layers.push_back(parse_layer(layers[i], "model.layers[" + std::to_string(i) + "]"));
    }

    if (doc.contains("train")) {
        const json& t = doc.at("train");
        cfg.train.epochs = get_or<std::size_t>(t, "epochs", "train.epochs", cfg.train.epochs);
        cfg.train.batch_size =
            get_or<std::size_t>(t, "batch_size", "train.batch_size", cfg.train.batch_size);
        cfg.train.learning_rate =
            get_or<double>(t, "learning_rate", "train.learning_rate", cfg.train.learning_rate);
    }
    if (doc.contains("ae")) {
        const json& t = doc.at("ae");
        cfg.ae_depth = get_or<std::size_t>(t, "depth", "ae.depth", cfg.ae_depth);
        cfg.ae_train.epochs = get_or<std::size_t>(t, "epochs", "ae.epochs", cfg.ae_train.epochs);
        cfg.ae_train.batch_size =
            get_or<std::size_t>(t, "batch_size", "ae.batch_size", cfg.ae_train.batch_size);
        cfg.ae_train.learning_rate =
            get_or<double>(t, "learning_rate", "ae.learning_rate", cfg.ae_train.learning_rate);
    }
    if (cfg.ae_depth < 3 || cfg.ae_depth % 2 == 0) {
        throw ConfigError("ae.depth must be odd and >= 3, got " + std::to_string(cfg.ae_depth));
    }

    if (doc.contains("capture_points")) {
        const json& cp = doc.at("capture_points");
        if (cp.is_string() && cp.get<std::string>() == "auto") {
            cfg.capture_auto = true;
        } else if (cp.is_array()) {
            cfg.capture_auto = false;
            cfg.capture_points = as<std::vector<std::string>>(cp, "capture_points");
        } else {
            throw ConfigError("capture_points must be \"auto\" or an array of layer names");
        }
    }

    if (doc.contains("data")) {
        const json& data = doc.at("data");
        if (data.contains("train")) cfg.data_train = parse_dataset(data.at("train"), "data.train");
        if (data.contains("test")) cfg.data_test = parse_dataset(data.at("test"), "data.test");
        if (data.contains("invalid_pool")) {
            cfg.data_invalid = parse_dataset(data.at("invalid_pool"), "data.invalid_pool");
        }
    }
    return cfg;
}

LabeledDataset load_dataset(const DatasetSpec& spec, std::uint64_t seed,
                            const Shape& reshape_to) {
    LabeledDataset data;
    if (spec.kind == "idx") {
        if (!fs::exists(spec.images)) {
            throw ConfigError("dataset file not found: " + spec.images + " (field " +
                              spec.field + ".images)");
        }
        if (!fs::exists(spec.labels)) {
            throw ConfigError("dataset file not found: " + spec.labels + " (field " +
                              spec.field + ".labels)");
        }
        data = load_idx(spec.images, spec.labels);
    } else if (spec.kind == "manifest") {
        if (!fs::exists(spec.manifest)) {
            throw ConfigError("dataset manifest not found: " + spec.manifest + " (field " +
                              spec.field + ".path)");
        }
        data = load_idx_from_manifest(spec.manifest);
    } else {
        Rng rng(stage_seed(seed, spec.field));
        data = make_clusters(rng, spec.num_classes, spec.dim, spec.samples_per_class,
                             spec.separation);
        if (!spec.offset.empty()) {
            if (spec.offset.size() != spec.dim) {
                throw ConfigError("offset length must equal dim (field " + spec.field +
                                  ".offset)");
            }
            const Tensor shift = Tensor::from_vector(spec.offset);
            for (Tensor& x : data.inputs) x = add(x, shift);
        }
    }
    if (!reshape_to.empty()) {
        for (Tensor& x : data.inputs) x = x.reshaped(reshape_to);
    }
    return data;
}

const DatasetSpec& require_dataset(const std::optional<DatasetSpec>& spec,
                                   const std::string& field) {
    if (!spec) throw ConfigError("missing config field: " + field);
    return *spec;
}

Tensor read_tensor_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("input is not valid JSON: " + std::string(e.what()));
    }
    const Shape shape = as<Shape>(need(doc, "shape", "shape"), "shape");
    std::vector<double> data = as<std::vector<double>>(need(doc, "data", "data"), "data");
    return Tensor(shape, std::move(data));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << text;
    if (!out.good()) throw IoError("write failure on file: " + path);
}

json json_number_or_inf(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_train_model(const PipelineConfig& cfg) {
    const LabeledDataset train_data =
        load_dataset(require_dataset(cfg.data_train, "data.train"), cfg.seed, cfg.input_shape);

    Rng rng(stage_seed(cfg.seed, "train-model"));
    Network net(cfg.layers);
    init_parameters(net, rng);
    TrainResult result = train_classifier(std::move(net), train_data, cfg.train, rng);

    json log;
    log["seed"] = cfg.seed;
    log["epochs"] = cfg.train.epochs;
    log["loss_history"] = result.loss_history;
    log["final_train_accuracy"] = result.final_accuracy;

    if (cfg.data_test) {
        const LabeledDataset test_data = load_dataset(*cfg.data_test, cfg.seed, cfg.input_shape);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < test_data.size(); ++i) {
            if (argmax_class(forward(result.network, test_data.inputs[i])) ==
                test_data.labels[i]) {
                ++correct;
            }
        }
        log["final_test_accuracy"] =
            static_cast<double>(correct) / static_cast<double>(test_data.size());
    }

    fs::create_directories(cfg.out_dir);
    const std::string model_path = (fs::path(cfg.out_dir) / "model.snet").string();
    save_model(result.network, model_path);
    write_text_file((fs::path(cfg.out_dir) / "train_log.json").string(), log.dump(2) + "\n");

    std::cout << "model written to " << model_path << "\n"
              << "final train accuracy " << result.final_accuracy << "\n";
    return 0;
}

int cmd_fit_assertions(const PipelineConfig& cfg, const std::string& model_path,
                       double holdout) {
    if (holdout < 0.0 || holdout >= 1.0) {
        throw ConfigError("holdout fraction must be in [0, 1)");
    }
    Network net = load_model(model_path);
    const LabeledDataset train_data =
        load_dataset(require_dataset(cfg.data_train, "data.train"), cfg.seed, cfg.input_shape);

    std::vector<std::string> capture =
        cfg.capture_auto ? default_capture_points(net) : cfg.capture_points;
    if (capture.empty()) {
        throw ConfigError("no capture points: the network has no usable non-final layer");
    }
    for (const std::string& name : capture) net.layer_index(name);

    std::vector<ActivationTrace> traces;
    traces.reserve(train_data.size());
    for (const Tensor& x : train_data.inputs) {
        traces.push_back(forward_with_capture(net, x, capture).second);
    }

    // Optional holdout: train AEs on one part, calibrate on the other.
    std::vector<std::size_t> fit_idx(traces.size()), calib_idx;
    for (std::size_t i = 0; i < traces.size(); ++i) fit_idx[i] = i;
    if (holdout > 0.0) {
        Rng split_rng(stage_seed(cfg.seed, "fit-assertions.holdout"));
        for (std::size_t i = 0; i + 1 < fit_idx.size(); ++i) {
            const std::size_t j = i + split_rng.next_below(fit_idx.size() - i);
            std::swap(fit_idx[i], fit_idx[j]);
        }
        const std::size_t keep = traces.size() -
            static_cast<std::size_t>(std::floor(holdout * static_cast<double>(traces.size())));
        if (keep == 0 || keep == traces.size()) {
            throw ConfigError("holdout fraction leaves an empty split");
        }
        calib_idx.assign(fit_idx.begin() + static_cast<std::ptrdiff_t>(keep), fit_idx.end());
        fit_idx.resize(keep);
    }

    std::vector<Assertion> assertions;
    for (const std::string& name : capture) {
        std::vector<Tensor> activations;
        activations.reserve(fit_idx.size());
        for (std::size_t i : fit_idx) activations.push_back(traces[i].at(name));
        if (activations.empty() || activations.front().size() == 0) {
            throw ConfigError("capture point " + name + " yields no activation data");
        }
        const AeSpec spec = build_ae(activations.front().size(), cfg.ae_depth);
        Rng rng(stage_seed(cfg.seed, "fit-assertions." + name));
        assertions.push_back(train_assertion(spec, name, activations, cfg.ae_train, rng));
        std::cout << "assertion " << name << ": dim " << spec.input_dim << ", mean loss "
                  << assertions.back().mean_loss() << "\n";
    }

    std::vector<ActivationTrace> calib_traces;
    if (!calib_idx.empty()) {
        calib_traces.reserve(calib_idx.size());
        for (std::size_t i : calib_idx) calib_traces.push_back(traces[i]);
    }
    CalibrationResult calibrated =
        calibrate(std::move(assertions), calib_idx.empty() ? traces : calib_traces,
                  {cfg.delta, capture});

    GuardedModel guarded(std::move(net), std::move(calibrated.assertions), capture, cfg.delta);
    const std::string bundle_dir = (fs::path(cfg.out_dir) / "bundle").string();
    save_bundle(guarded, calibrated.report, bundle_dir);
    std::cout << "bundle written to " << bundle_dir << "\n";
    return 0;
}

int cmd_calibrate(const std::string& bundle_dir, double new_delta,
                  const std::string& out_dir) {
    if (!(new_delta > 0.0)) throw ConfigError("delta must be > 0");
    if (fs::weakly_canonical(out_dir) == fs::weakly_canonical(bundle_dir)) {
        throw ConfigError("calibrate never rewrites its input bundle; pass a different --out");
    }
    LoadedBundle bundle = load_bundle(bundle_dir);

    std::vector<Assertion> assertions;
    for (const Assertion& a : bundle.model.assertions()) {
        Assertion updated = a;
        updated.set_calibration(a.mean_loss(), new_delta * a.mean_loss(), new_delta);
        assertions.push_back(std::move(updated));
    }
    CalibrationReport report = bundle.report;
    report.delta = new_delta;
    for (AssertionCalibration& entry : report.per_assertion) {
        entry.threshold = new_delta * entry.mean_loss;
    }

    GuardedModel updated(bundle.model.network(), std::move(assertions),
                         bundle.model.capture_points(), new_delta);
    save_bundle(updated, report, out_dir);
    std::cout << "bundle recalibrated at delta " << new_delta << " in " << out_dir << "\n";
    return 0;
}

int cmd_check(const std::string& bundle_dir, const std::string& input_path) {
    LoadedBundle bundle = load_bundle(bundle_dir);
    const Tensor input = read_tensor_json(input_path);
    const Verdict verdict = bundle.model.verify_input(input);

    json doc;
    doc["validity"] = verdict.validity;
    doc["predicted_class"] = verdict.predicted_class;
    doc["anomaly_score"] = json_number_or_inf(verdict.anomaly_score);
    doc["per_assertion"] = json::array();
    for (const AssertionResult& r : verdict.per_assertion) {
        doc["per_assertion"].push_back({{"layer", r.layer},
                                        {"loss", r.loss},
                                        {"threshold", r.threshold},
                                        {"passed", r.passed}});
    }
    std::cout << doc.dump(2) << "\n";
    return verdict.validity ? 0 : 1;
}

int cmd_evaluate(const PipelineConfig& cfg, const std::string& bundle_dir, double fraction,
                 bool sweep) {
    LoadedBundle bundle = load_bundle(bundle_dir);
    const LabeledDataset valid_test =
        load_dataset(require_dataset(cfg.data_test, "data.test"), cfg.seed, cfg.input_shape);
    const LabeledDataset invalid_pool = load_dataset(
        require_dataset(cfg.data_invalid, "data.invalid_pool"), cfg.seed, cfg.input_shape);

    Rng rng(stage_seed(cfg.seed, "evaluate"));
    const LabeledDataset mixed = inject_invalid(valid_test, invalid_pool, fraction, rng);
    const std::size_t injected = static_cast<std::size_t>(
        std::count(mixed.validity_labels.begin(), mixed.validity_labels.end(), true));
    if (injected == 0) {
        throw ConfigError("fraction " + std::to_string(fraction) + " floors to zero injected"
                          " samples over " + std::to_string(mixed.size()) +
                          " items; raise the fraction or enlarge the test set");
    }

    std::vector<double> scores;
    scores.reserve(mixed.size());
    for (const Tensor& x : mixed.inputs) scores.push_back(bundle.model.anomaly_score(x));

    const EvalReport report =
        evaluate_detection(scores, mixed.validity_labels, bundle.model.delta());

    fs::create_directories(cfg.out_dir);
    const fs::path base(cfg.out_dir);
    write_eval_report(report, (base / "eval_report.json").string(), sweep);
    if (sweep) write_roc_csv(report.roc_points, (base / "roc.csv").string());

    std::ostringstream rows;
    rows.precision(17);
    rows << "index,score,truly_invalid,flagged\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        rows << i << ',' << scores[i] << ',' << (mixed.validity_labels[i] ? 1 : 0) << ','
             << (scores[i] > bundle.model.delta() ? 1 : 0) << '\n';
    }
    write_text_file((base / "scores.csv").string(), rows.str());

    std::cout << "delta " << report.delta << ": tpr " << report.tpr << ", fpr " << report.fpr;
    if (sweep) std::cout << ", auc " << report.auc;
    std::cout << "\nreport written to " << (base / "eval_report.json").string() << "\n";
    return 0;
}

int cmd_dataset_urls() {
    std::cout << "MNIST (IDX, gzip):\n"
                 "  https://storage.googleapis.com/cvdf-datasets/mnist/train-images-idx3-ubyte.gz\n"
                 "  https://storage.googleapis.com/cvdf-datasets/mnist/train-labels-idx1-ubyte.gz\n"
                 "  https://storage.googleapis.com/cvdf-datasets/mnist/t10k-images-idx3-ubyte.gz\n"
                 "  https://storage.googleapis.com/cvdf-datasets/mnist/t10k-labels-idx1-ubyte.gz\n"
                 "Fashion-MNIST (IDX, gzip):\n"
                 "  http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/train-images-idx3-ubyte.gz\n"
                 "  http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/train-labels-idx1-ubyte.gz\n"
                 "  http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/t10k-images-idx3-ubyte.gz\n"
                 "  http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/t10k-labels-idx1-ubyte.gz\n"
                 "Decompress with gunzip; the loader reads raw IDX files.\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AutoEncoder-assertion guard for feed-forward classifiers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    std::string out_override;
    app.add_option("--config", config_path, "pipeline config JSON");
    app.add_option("--seed", seed_override, "override the config seed")
        ->each([&seed_given](const std::string&) { seed_given = true; });
    app.add_option("--out", out_override, "override the config output directory");

    auto* train_cmd = app.add_subcommand("train-model", "train the target classifier");

    auto* fit_cmd = app.add_subcommand("fit-assertions",
                                       "build, train, and calibrate assertions");
    std::string model_path;
    double holdout = 0.0;
    fit_cmd->add_option("--model", model_path, "trained model file")->required();
    fit_cmd->add_option("--holdout", holdout,
                        "calibrate on this held-out fraction instead of the full set");

    auto* calib_cmd = app.add_subcommand("calibrate", "re-calibrate a bundle at a new delta");
    std::string bundle_dir;
    double new_delta = 0.0;
    std::string calib_out;
    calib_cmd->add_option("--bundle", bundle_dir, "bundle directory")->required();
    calib_cmd->add_option("--delta", new_delta, "new scale coefficient")->required();
    calib_cmd->add_option("--out", calib_out, "directory for the recalibrated bundle")
        ->required();

    auto* check_cmd = app.add_subcommand("check", "verify one input against a bundle");
    std::string check_bundle, input_path;
    check_cmd->add_option("--bundle", check_bundle, "bundle directory")->required();
    check_cmd->add_option("--input", input_path, "input tensor JSON {shape, data}")->required();

    auto* eval_cmd = app.add_subcommand("evaluate", "measure detection quality on a mixed set");
    std::string eval_bundle;
    double fraction = 0.5;
    bool no_sweep = false;
    eval_cmd->add_option("--bundle", eval_bundle, "bundle directory")->required();
    eval_cmd->add_option("--fraction", fraction, "fraction of test items to replace");
    eval_cmd->add_flag("--no-sweep", no_sweep, "skip the ROC sweep, report only TPR/FPR");

    auto* urls_cmd = app.add_subcommand("dataset-urls", "print official dataset download URLs");

    try {
        app.parse(argc, argv);

        PipelineConfig cfg;
        const bool needs_config = train_cmd->parsed() || fit_cmd->parsed() || eval_cmd->parsed();
        if (needs_config) {
            if (config_path.empty()) throw ConfigError("--config is required for this command");
            cfg = load_pipeline_config(config_path);
            if (seed_given) cfg.seed = seed_override;
            if (!out_override.empty()) cfg.out_dir = out_override;
        }

        if (train_cmd->parsed()) return cmd_train_model(cfg);
        if (fit_cmd->parsed()) return cmd_fit_assertions(cfg, model_path, holdout);
        if (calib_cmd->parsed()) return cmd_calibrate(bundle_dir, new_delta, calib_out);
        if (check_cmd->parsed()) return cmd_check(check_bundle, input_path);
        if (eval_cmd->parsed()) return cmd_evaluate(cfg, eval_bundle, fraction, !no_sweep);
        if (urls_cmd->parsed()) return cmd_dataset_urls();
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
