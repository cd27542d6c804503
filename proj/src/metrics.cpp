#include "guardnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "guardnet/error.hpp"

namespace guardnet {

ConfusionCounts confusion(const std::vector<bool>& flagged_invalid,
                          const std::vector<bool>& truly_invalid) {
    if (flagged_invalid.size() != truly_invalid.size()) {
        throw DataError("confusion: " + std::to_string(flagged_invalid.size()) +
                        " verdicts vs " + std::to_string(truly_invalid.size()) + " labels");
    }
    if (flagged_invalid.empty()) {
        throw DataError("confusion: no samples");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < flagged_invalid.size(); ++i) {
        if (truly_invalid[i]) {
            flagged_invalid[i] ? ++c.tp : ++c.fn;
        } else {
            flagged_invalid[i] ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) {
        throw DataError("roc_auc: " + std::to_string(scores.size()) + " scores vs " +
                        std::to_string(labels.size()) + " labels");
    }
    const std::size_t n = scores.size();
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(scores[i]) || scores[i] == -std::numeric_limits<double>::infinity()) {
            throw DomainError("roc_auc: scores must be finite or +inf");
        }
        if (labels[i]) ++positives;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw DomainError("roc_auc: both classes must be present");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Rank sum of the positive class with average ranks over tie groups.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(positives);
    const double nn = static_cast<double>(negatives);

    RocCurve curve;
    curve.auc = (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);

    // Sweep thresholds downward through the unique scores; a sample is
    // flagged when its score strictly exceeds the threshold.
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t k = n;
    while (k > 0) {
        std::size_t j = k;
        while (j > 0 && scores[order[j - 1]] == scores[order[k - 1]]) --j;
        for (std::size_t t = j; t < k; ++t) {
            if (labels[order[t]]) ++tp; else ++fp;
        }
        curve.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
        k = j;
    }
    return curve;
}

EvalReport evaluate_detection(const std::vector<double>& scores,
                              const std::vector<bool>& truly_invalid, double delta) {
    RocCurve curve = roc_auc(scores, truly_invalid);  // also rejects one-sided inputs

    std::vector<bool> flagged(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) flagged[i] = scores[i] > delta;

    EvalReport report;
    report.delta = delta;
    report.counts = confusion(flagged, truly_invalid);
    report.tpr = static_cast<double>(report.counts.tp) /
                 static_cast<double>(report.counts.tp + report.counts.fn);
    report.fpr = static_cast<double>(report.counts.fp) /
                 static_cast<double>(report.counts.fp + report.counts.tn);
    report.auc = curve.auc;
    report.roc_points = std::move(curve.points);
    return report;
}

std::string eval_report_to_json(const EvalReport& report, bool include_sweep) {
    nlohmann::json doc;
    doc["delta"] = report.delta;
    doc["tpr"] = report.tpr;
    doc["fpr"] = report.fpr;
    doc["counts"] = {{"tp", report.counts.tp},
                     {"fp", report.counts.fp},
                     {"tn", report.counts.tn},
                     {"fn", report.counts.fn}};
    if (include_sweep) {
        doc["auc"] = report.auc;
        doc["roc_points"] = nlohmann::json::array();
        for (const RocPoint& p : report.roc_points) {
            doc["roc_points"].push_back({p.fpr, p.tpr});
        }
    }
    return doc.dump(2);
}

void write_eval_report(const EvalReport& report, const std::string& path,
                       bool include_sweep) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << eval_report_to_json(report, include_sweep) << '\n';
    if (!out.good()) throw IoError("write failure on file: " + path);
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.precision(17);
    out << "fpr,tpr\n";
    for (const RocPoint& p : points) {
        out << p.fpr << ',' << p.tpr << '\n';
    }
    if (!out.good()) throw IoError("write failure on file: " + path);
}

}  // namespace guardnet
