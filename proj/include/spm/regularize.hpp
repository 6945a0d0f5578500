// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_REGULARIZE_HPP
#define SPM_REGULARIZE_HPP

#include <vector>

#include "spm/decomposition.hpp"
#include "spm/features.hpp"
#include "spm/fusion.hpp"

namespace spm {

struct RegularizeParams {
  double gamma = 0.5;
  int max_sweeps = 10;
  // Pairwise neighborhood: the adjacency graph by default, optionally the
  // superpatch membership within this radius.
  double neighborhood_radius = 0.0;
};

/// Energy of a labeling: per-superpixel data term 1 - L_label(i) plus, once
/// per undirected neighbor pair, exp(-d(F_i, F_j) / gamma) when the labels
/// disagree.
double labeling_energy(const std::vector<int>& labels,
                       const LabelFusionMap& fusion,
                       const Decomposition& decomp,
                       const FeatureTable& features,
                       const RegularizeParams& params);

/// Alpha-expansion minimization of labeling_energy starting from the argmax
/// labeling. Labels are visited in ascending order; each move is solved
/// exactly as a binary min-cut (submodularity is asserted at construction)
/// and adopted only when the independently recomputed energy drops. The
/// result never has higher energy than the argmax labeling.
std::vector<int> regularize(const LabelFusionMap& fusion,
                            const Decomposition& decomp,
                            const FeatureTable& features,
                            const RegularizeParams& params,
                            std::vector<double>* sweep_energies = nullptr);

}  // namespace spm

#endif  // SPM_REGULARIZE_HPP
