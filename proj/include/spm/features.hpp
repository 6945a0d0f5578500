// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_FEATURES_HPP
#define SPM_FEATURES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "spm/decomposition.hpp"
#include "spm/image.hpp"

namespace spm {

/// One descriptor row per superpixel; rows are contiguous.
using FeatureTable =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class FeatureKind {
  kMeanColor,
  kCumulativeHistogram,   // per-channel CDF, non-decreasing, ends at 1
  kOrientationHistogram,  // 9 unsigned bins over [0, pi), L2-normalized
  kConcat,                // cumulative histogram block + orientation block
};

struct FeatureConfig {
  FeatureKind kind = FeatureKind::kCumulativeHistogram;
  int bins = 16;               // histogram bins per channel
  double color_weight = 1.0;   // block scalings used by kConcat
  double texture_weight = 1.0;

  /// Parses names like "mean-color", "cumulative-histogram",
  /// "orientation-histogram", "concat". Bins/weights keep their defaults.
  static FeatureConfig parse(const std::string& name);

  std::string name() const;
  std::uint64_t content_hash() const;
  int dimension(int channels) const;

  bool operator==(const FeatureConfig&) const = default;
};

/// Computes one descriptor per superpixel. Deterministic; throws DomainError
/// when decomposition and image dimensions disagree.
FeatureTable compute_features(const Decomposition& decomp,
                              const ImageGrid& image,
                              const FeatureConfig& config);

}  // namespace spm

#endif  // SPM_FEATURES_HPP
