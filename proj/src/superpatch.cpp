// SPDX-License-Identifier: Apache-2.0

#include "spm/superpatch.hpp"

#include <cmath>

#include "spm/errors.hpp"

namespace spm {

DistanceParams default_distance_params(const Decomposition& decomp,
                                       double radius) {
  DistanceParams params;
  params.sigma1 = 0.5 * mean_superpixel_spacing(decomp);
  params.sigma2 = radius > 0.0 ? std::sqrt(2.0) * radius : 1.0;
  return params;
}

DistanceParams patch_degeneration_mode(DistanceParams params) {
  params.exact_offset_mode = true;
  return params;
}

SuperPatch build_superpatch(const Decomposition& decomp, int center,
                            double radius) {
  if (center < 0 || center >= decomp.size())
    throw DomainError("superpixel index out of range");
  if (radius < 0.0) throw DomainError("superpatch radius must be >= 0");

  SuperPatch patch;
  patch.center = center;
  patch.radius = radius;
  const Eigen::Vector2d c = decomp.superpixels[center].barycenter;
  for (const auto& rec : decomp.superpixels) {
    const Eigen::Vector2d offset = rec.barycenter - c;
    if (offset.norm() <= radius || rec.index == center)
      patch.members.push_back({rec.index, offset});
  }
  return patch;
}

std::vector<SuperPatch> build_all_superpatches(const Decomposition& decomp,
                                               double radius) {
  std::vector<SuperPatch> patches;
  patches.reserve(decomp.size());
  for (int i = 0; i < decomp.size(); ++i)
    patches.push_back(build_superpatch(decomp, i, radius));
  return patches;
}

double pair_weight(const Eigen::Vector2d& member_a,
                   const Eigen::Vector2d& center_a,
                   const Eigen::Vector2d& member_b,
                   const Eigen::Vector2d& center_b,
                   const DistanceParams& params) {
  const Eigen::Vector2d offset_a = member_a - center_a;
  const Eigen::Vector2d offset_b = member_b - center_b;
  if (params.exact_offset_mode)
    return (offset_a - offset_b).norm() <= 1e-9 ? 1.0 : 0.0;
  const double s1 = params.sigma1 * params.sigma1;
  const double s2 = params.sigma2 * params.sigma2;
  return std::exp(-(offset_b - offset_a).squaredNorm() / s1) *
         std::exp(-offset_a.squaredNorm() / s2) *
         std::exp(-offset_b.squaredNorm() / s2);
}

}  // namespace spm
