// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_FUSION_HPP
#define SPM_FUSION_HPP

#include <Eigen/Core>
#include <vector>

#include "spm/search.hpp"

namespace spm {

struct FusionParams {
  double alpha = 2.0;
  double beta = 4.0;  // infinity disables the spatial prior
  double epsilon = 1e-12;
};

/// Per-superpixel probability over the library's label set. Rows sum to 1.
struct LabelFusionMap {
  Eigen::MatrixXd probabilities;  // superpixels x labels

  int superpixel_count() const {
    return static_cast<int>(probabilities.rows());
  }
  int label_count() const { return static_cast<int>(probabilities.cols()); }
};

/// Exemplar vote weight exp(1 - (D / h^2 + |c_i - c_j| / beta^2)) with
/// h^2 = alpha^2 (min_k D + epsilon); the spatial term drops for beta = inf.
double fusion_weight(double distance, double min_distance_over_k,
                     double spatial_distance, const FusionParams& params);

/// Groups each superpixel's k matches by exemplar label and normalizes the
/// exponential vote weights into per-label probabilities. Requires a fully
/// labeled library. Library barycenters are mapped into the query frame when
/// image sizes differ.
LabelFusionMap label_fusion(const AnnField& field, const Decomposition& query,
                            const ExemplarLibrary& library,
                            const FusionParams& params);

/// Highest-probability label per superpixel, ties to the lowest label.
std::vector<int> argmax_label(const LabelFusionMap& fusion);

/// Paints each pixel with its superpixel's label.
LabelMap expand_to_pixels(const std::vector<int>& labeling,
                          const Decomposition& decomp);

}  // namespace spm

#endif  // SPM_FUSION_HPP
