#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace guardnet {

/// Confusion counts with "invalid input" as the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

ConfusionCounts confusion(const std::vector<bool>& flagged_invalid,
                          const std::vector<bool>& truly_invalid);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    double auc = 0.0;
    std::vector<RocPoint> points;
};

/// AUC by the rank method (Mann-Whitney, ties counted half) plus the ROC
/// points from sweeping every unique score threshold with the decision rule
/// "flagged invalid iff score > threshold". Scores may be +inf (ranked above
/// all finite scores); both classes must be present.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

/// Detection quality at a deployed delta plus the full score sweep.
struct EvalReport {
    double tpr = 0.0;
    double fpr = 0.0;
    double auc = 0.0;
    std::vector<RocPoint> roc_points;
    ConfusionCounts counts;
    double delta = 0.0;
};

/// Point metrics with flagged := score > delta, and the ROC sweep over the
/// same scores. The (fpr, tpr) pair always lies on the returned curve.
EvalReport evaluate_detection(const std::vector<double>& scores,
                              const std::vector<bool>& truly_invalid, double delta);

std::string eval_report_to_json(const EvalReport& report, bool include_sweep = true);
void write_eval_report(const EvalReport& report, const std::string& path,
                       bool include_sweep = true);

/// One "fpr,tpr" line per ROC point.
void write_roc_csv(const std::vector<RocPoint>& points, const std::string& path);

}  // namespace guardnet
