// SPDX-License-Identifier: Apache-2.0

#include "spm/fusion.hpp"

#include <cmath>
#include <limits>

#include "spm/errors.hpp"

namespace spm {

double fusion_weight(double distance, double min_distance_over_k,
                     double spatial_distance, const FusionParams& params) {
  const double h2 =
      params.alpha * params.alpha * (min_distance_over_k + params.epsilon);
  double exponent = 1.0 - distance / h2;
  if (std::isfinite(params.beta))
    exponent -= spatial_distance / (params.beta * params.beta);
  return std::exp(exponent);
}

LabelFusionMap label_fusion(const AnnField& field, const Decomposition& query,
                            const ExemplarLibrary& library,
                            const FusionParams& params) {
  if (!library.fully_labeled())
    throw DomainError("label fusion requires a fully labeled library");
  if (params.alpha <= 0.0) throw DomainError("alpha must be positive");
  if (params.beta <= 0.0) throw DomainError("beta must be positive");
  if (params.epsilon <= 0.0) throw DomainError("epsilon must be positive");
  if (field.superpixel_count() != query.size())
    throw DomainError("ANN field does not cover the query decomposition");

  const int classes = library.label_count();
  LabelFusionMap fusion;
  fusion.probabilities = Eigen::MatrixXd::Zero(query.size(), classes);

  for (int i = 0; i < query.size(); ++i) {
    const auto& matches = field.matches[i];
    if (matches.empty()) continue;

    double min_distance = std::numeric_limits<double>::infinity();
    for (const auto& m : matches)
      min_distance = std::min(min_distance, m.distance);

    const Eigen::Vector2d ci = query.superpixels[i].barycenter;
    double total = 0.0;
    for (const auto& m : matches) {
      const LibraryEntry& entry = library.entry(m.image_id);
      double spatial = 0.0;
      if (std::isfinite(params.beta)) {
        Eigen::Vector2d cj =
            entry.decomposition.superpixels[m.superpixel_id].barycenter;
        cj.x() *= static_cast<double>(query.width()) / entry.image.width();
        cj.y() *= static_cast<double>(query.height()) / entry.image.height();
        spatial = (ci - cj).norm();
      }
      const double w = fusion_weight(m.distance, min_distance, spatial, params);
      fusion.probabilities(i, entry.superpixel_labels[m.superpixel_id]) += w;
      total += w;
    }
    fusion.probabilities.row(i) /= total;
  }
  return fusion;
}

std::vector<int> argmax_label(const LabelFusionMap& fusion) {
  std::vector<int> labels(fusion.superpixel_count(), 0);
  for (int i = 0; i < fusion.superpixel_count(); ++i) {
    double best = -1.0;
    for (int m = 0; m < fusion.label_count(); ++m) {
      if (fusion.probabilities(i, m) > best) {
        best = fusion.probabilities(i, m);
        labels[i] = m;
      }
    }
  }
  return labels;
}

LabelMap expand_to_pixels(const std::vector<int>& labeling,
                          const Decomposition& decomp) {
  if (static_cast<int>(labeling.size()) != decomp.size())
    throw DomainError("labeling does not cover the decomposition");
  LabelMap map(decomp.width(), decomp.height());
  for (int y = 0; y < decomp.height(); ++y)
    for (int x = 0; x < decomp.width(); ++x)
      map.at(x, y) = labeling[decomp.superpixel_at(x, y)];
  return map;
}

}  // namespace spm
