// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_METRICS_HPP
#define SPM_METRICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "spm/fusion.hpp"
#include "spm/image.hpp"

namespace spm {

struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.0;
};

struct StageTimings {
  double search = 0.0;
  double fusion = 0.0;
  double regularization = 0.0;
};

struct MetricsReport {
  double superpixel_accuracy = 0.0;
  double pixel_accuracy = 0.0;
  std::vector<double> dice;      // per label
  std::vector<RocCurve> roc;     // per label
  StageTimings wall_time_sec;
  std::int64_t distance_evaluations = 0;
  std::int64_t evaluations_per_superpixel_per_iteration = 0;

  std::string to_json() const;
  std::string to_table() const;
};

/// Fraction of superpixels whose predicted label matches the truth.
double superpixel_accuracy(const std::vector<int>& predicted,
                           const std::vector<int>& truth);

/// Fraction of pixels whose labels agree.
double pixel_accuracy(const LabelMap& predicted, const LabelMap& truth);

/// Overlap 2|X n Y| / (|X| + |Y|) between nonzero masks; 1 when both empty.
double dice_coefficient(const Eigen::ArrayXXi& predicted_mask,
                        const Eigen::ArrayXXi& truth_mask);

/// Dice for one label value of two label maps.
double dice_for_label(const LabelMap& predicted, const LabelMap& truth,
                      int label);

/// Threshold sweep treating `positive` entries as the positive class; AUC by
/// the trapezoid rule with tied scores grouped. Degenerate truth (all
/// positive or all negative) yields NaN.
RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<bool>& positive);

/// Per-label accuracy/dice/ROC of a superpixel labeling against per-superpixel
/// truth, with pixel metrics computed on the expanded maps.
MetricsReport accuracy_metrics(const std::vector<int>& predicted,
                               const std::vector<int>& truth,
                               const Decomposition& decomp,
                               const LabelFusionMap* fusion = nullptr);

}  // namespace spm

#endif  // SPM_METRICS_HPP
