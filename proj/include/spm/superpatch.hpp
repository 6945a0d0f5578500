// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_SUPERPATCH_HPP
#define SPM_SUPERPATCH_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spm/decomposition.hpp"
#include "spm/features.hpp"

namespace spm {

struct SuperPatchMember {
  int superpixel = 0;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();  // member - center barycenter
};

/// A superpixel together with every superpixel whose barycenter lies within
/// radius R of its own, carrying the registered offsets. Always contains the
/// center itself at offset (0, 0).
struct SuperPatch {
  int center = 0;
  double radius = 0.0;
  std::vector<SuperPatchMember> members;  // ascending superpixel index
};

struct DistanceParams {
  double sigma1 = 1.0;  // registration scale, pixels
  double sigma2 = 1.0;  // member down-weighting scale, pixels
  // Pixel-patch degeneration: pair weight becomes the indicator of exact
  // offset agreement (1e-9 px tolerance) and the member weights drop out.
  bool exact_offset_mode = false;
};

/// Defaults derived from the query decomposition: sigma1 = half the mean
/// barycenter spacing, sigma2 = sqrt(2) * R (1 when R = 0 and the value is
/// irrelevant because every offset is zero).
DistanceParams default_distance_params(const Decomposition& decomp,
                                       double radius);

/// The sigma1 -> 0, sigma2 -> inf limit that makes the superpatch distance
/// collapse to a normalized SSD on per-pixel decompositions.
DistanceParams patch_degeneration_mode(DistanceParams params);

SuperPatch build_superpatch(const Decomposition& decomp, int center,
                            double radius);

std::vector<SuperPatch> build_all_superpatches(const Decomposition& decomp,
                                               double radius);

/// Registration weight between member a of a superpatch centered at center_a
/// and member b of one centered at center_b; the product of the offset
/// mismatch term and both members' distance-to-center terms. In (0, 1].
double pair_weight(const Eigen::Vector2d& member_a,
                   const Eigen::Vector2d& center_a,
                   const Eigen::Vector2d& member_b,
                   const Eigen::Vector2d& center_b,
                   const DistanceParams& params);

struct EuclideanMetric {
  double operator()(Eigen::Ref<const Eigen::RowVectorXd> a,
                    Eigen::Ref<const Eigen::RowVectorXd> b) const {
    return (a - b).norm();
  }
};

/// Weighted mean of pairwise feature distances over all member pairs,
/// Gaussian-weighted by registered offset agreement. Symmetric and finite;
/// exponent shifting keeps the ratio stable for extreme parameter choices.
template <typename Metric = EuclideanMetric>
double superpatch_distance(const SuperPatch& a, const SuperPatch& b,
                           const FeatureTable& features_a,
                           const FeatureTable& features_b,
                           const DistanceParams& params, Metric metric = {}) {
  constexpr double kOffsetTolerance = 1e-9;
  if (params.exact_offset_mode) {
    double sum = 0.0;
    double count = 0.0;
    for (const auto& ma : a.members)
      for (const auto& mb : b.members) {
        if ((ma.offset - mb.offset).norm() > kOffsetTolerance) continue;
        sum += metric(features_a.row(ma.superpixel),
                      features_b.row(mb.superpixel));
        count += 1.0;
      }
    // The two centers always align at offset (0, 0), so count >= 1.
    return sum / count;
  }

  const double inv_s1 = 1.0 / (params.sigma1 * params.sigma1);
  const double inv_s2 = 1.0 / (params.sigma2 * params.sigma2);
  auto exponent = [&](const SuperPatchMember& ma, const SuperPatchMember& mb) {
    return -((mb.offset - ma.offset).squaredNorm() * inv_s1 +
             (ma.offset.squaredNorm() + mb.offset.squaredNorm()) * inv_s2);
  };

  double max_exponent = -std::numeric_limits<double>::infinity();
  for (const auto& ma : a.members)
    for (const auto& mb : b.members)
      max_exponent = std::max(max_exponent, exponent(ma, mb));

  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& ma : a.members)
    for (const auto& mb : b.members) {
      const double w = std::exp(exponent(ma, mb) - max_exponent);
      numerator += w * metric(features_a.row(ma.superpixel),
                              features_b.row(mb.superpixel));
      denominator += w;
    }
  return numerator / denominator;
}

}  // namespace spm

#endif  // SPM_SUPERPATCH_HPP
