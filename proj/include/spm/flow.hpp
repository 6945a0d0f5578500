// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_FLOW_HPP
#define SPM_FLOW_HPP

#include <Eigen/Core>
#include <vector>

#include "spm/search.hpp"

namespace spm {

/// Per query superpixel: matched barycenter minus source barycenter, pixels.
struct DisplacementField {
  std::vector<Eigen::Vector2d> displacement;

  std::vector<double> magnitudes() const;
};

/// Uses each superpixel's best-of-k match; matched barycenters are scaled
/// into the query frame when image sizes differ.
DisplacementField displacement_field(const AnnField& field,
                                     const Decomposition& query,
                                     const ExemplarLibrary& library);

/// Color-wheel rendering: hue from direction, saturation from magnitude
/// normalized by the field's own maximum; zero displacement is white.
ImageGrid render_flow(const DisplacementField& field,
                      const Decomposition& decomp);

/// Least-squares affine map src -> dst as [A | t] (2x3).
Eigen::Matrix<double, 2, 3> fit_affine(
    const std::vector<Eigen::Vector2d>& src,
    const std::vector<Eigen::Vector2d>& dst);

double median(std::vector<double> values);

}  // namespace spm

#endif  // SPM_FLOW_HPP
