// SPDX-License-Identifier: Apache-2.0

#include "spm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spm/errors.hpp"

namespace spm {

namespace {
using json = nlohmann::json;
}

double superpixel_accuracy(const std::vector<int>& predicted,
                           const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw DomainError("labelings must be non-empty and the same size");
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    correct += predicted[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double pixel_accuracy(const LabelMap& predicted, const LabelMap& truth) {
  if (predicted.width() != truth.width() ||
      predicted.height() != truth.height())
    throw DomainError("label maps differ in size");
  const std::int64_t correct = (predicted.labels == truth.labels).count();
  return static_cast<double>(correct) /
         static_cast<double>(predicted.labels.size());
}

double dice_coefficient(const Eigen::ArrayXXi& predicted_mask,
                        const Eigen::ArrayXXi& truth_mask) {
  if (predicted_mask.rows() != truth_mask.rows() ||
      predicted_mask.cols() != truth_mask.cols())
    throw DomainError("masks differ in size");
  const auto p = predicted_mask != 0;
  const auto t = truth_mask != 0;
  const std::int64_t intersection = (p && t).count();
  const std::int64_t total = p.count() + t.count();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(intersection) / static_cast<double>(total);
}

double dice_for_label(const LabelMap& predicted, const LabelMap& truth,
                      int label) {
  return dice_coefficient((predicted.labels == label).cast<int>(),
                          (truth.labels == label).cast<int>());
}

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<bool>& positive) {
  if (scores.size() != positive.size() || scores.empty())
    throw DomainError("scores and truth must be non-empty and the same size");
  const std::int64_t positives =
      std::count(positive.begin(), positive.end(), true);
  const std::int64_t negatives =
      static_cast<std::int64_t>(positive.size()) - positives;

  RocCurve curve;
  if (positives == 0 || negatives == 0) {
    curve.auc = std::numeric_limits<double>::quiet_NaN();
    return curve;
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  curve.tpr.push_back(0.0);
  curve.fpr.push_back(0.0);

  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Consume the whole group of tied scores before emitting a point.
    while (i < order.size() && scores[order[i]] == threshold) {
      if (positive[order[i]])
        ++tp;
      else
        ++fp;
      ++i;
    }
    curve.thresholds.push_back(threshold);
    curve.tpr.push_back(static_cast<double>(tp) / positives);
    curve.fpr.push_back(static_cast<double>(fp) / negatives);
  }

  double auc = 0.0;
  for (std::size_t j = 1; j < curve.fpr.size(); ++j)
    auc += 0.5 * (curve.fpr[j] - curve.fpr[j - 1]) *
           (curve.tpr[j] + curve.tpr[j - 1]);
  curve.auc = auc;
  return curve;
}

MetricsReport accuracy_metrics(const std::vector<int>& predicted,
                               const std::vector<int>& truth,
                               const Decomposition& decomp,
                               const LabelFusionMap* fusion) {
  if (static_cast<int>(predicted.size()) != decomp.size() ||
      predicted.size() != truth.size())
    throw DomainError("labelings do not cover the decomposition");

  MetricsReport report;
  report.superpixel_accuracy = superpixel_accuracy(predicted, truth);
  const LabelMap predicted_map = expand_to_pixels(predicted, decomp);
  const LabelMap truth_map = expand_to_pixels(truth, decomp);
  report.pixel_accuracy = pixel_accuracy(predicted_map, truth_map);

  const int classes =
      1 + std::max(*std::max_element(predicted.begin(), predicted.end()),
                   *std::max_element(truth.begin(), truth.end()));
  report.dice.resize(classes);
  for (int m = 0; m < classes; ++m)
    report.dice[m] = dice_for_label(predicted_map, truth_map, m);

  if (fusion && fusion->superpixel_count() == decomp.size()) {
    report.roc.resize(std::min(classes, fusion->label_count()));
    for (std::size_t m = 0; m < report.roc.size(); ++m) {
      std::vector<double> scores(truth.size());
      std::vector<bool> positive(truth.size());
      for (std::size_t i = 0; i < truth.size(); ++i) {
        scores[i] = fusion->probabilities(static_cast<int>(i),
                                          static_cast<int>(m));
        positive[i] = truth[i] == static_cast<int>(m);
      }
      report.roc[m] = roc_curve(scores, positive);
    }
  }
  return report;
}

std::string MetricsReport::to_json() const {
  json j;
  j["superpixel_accuracy"] = superpixel_accuracy;
  j["pixel_accuracy"] = pixel_accuracy;
  j["dice"] = dice;
  json rocs = json::array();
  for (const auto& r : roc) {
    json entry;
    entry["auc"] = std::isnan(r.auc) ? json() : json(r.auc);
    entry["thresholds"] = r.thresholds;
    entry["tpr"] = r.tpr;
    entry["fpr"] = r.fpr;
    rocs.push_back(std::move(entry));
  }
  j["roc"] = std::move(rocs);
  j["wall_time_sec"] = {{"search", wall_time_sec.search},
                        {"fusion", wall_time_sec.fusion},
                        {"regularization", wall_time_sec.regularization}};
  j["distance_evaluations"] = distance_evaluations;
  j["evaluations_per_superpixel_per_iteration"] =
      evaluations_per_superpixel_per_iteration;
  return j.dump(2);
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  out << "metric                     value\n";
  out << "superpixel accuracy        " << superpixel_accuracy << "\n";
  out << "pixel accuracy             " << pixel_accuracy << "\n";
  for (std::size_t m = 0; m < dice.size(); ++m)
    out << "dice[" << m << "]                    " << dice[m] << "\n";
  for (std::size_t m = 0; m < roc.size(); ++m)
    out << "auc[" << m << "]                     " << roc[m].auc << "\n";
  out << "search time (s)            " << wall_time_sec.search << "\n";
  out << "fusion time (s)            " << wall_time_sec.fusion << "\n";
  out << "regularization time (s)    " << wall_time_sec.regularization << "\n";
  out << "distance evaluations       " << distance_evaluations << "\n";
  out << "evals / superpixel / iter  "
      << evaluations_per_superpixel_per_iteration << "\n";
  return out.str();
}

}  // namespace spm
