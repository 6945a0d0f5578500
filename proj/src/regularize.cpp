// SPDX-License-Identifier: Apache-2.0

#include "spm/regularize.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "spm/errors.hpp"
#include "spm/maxflow.hpp"

namespace spm {

namespace {

struct WeightedEdge {
  int a;
  int b;
  double weight;  // exp(-d(F_a, F_b) / gamma)
};

std::vector<WeightedEdge> build_edges(const Decomposition& decomp,
                                      const FeatureTable& features,
                                      const RegularizeParams& params) {
  std::vector<WeightedEdge> edges;
  auto weight = [&](int a, int b) {
    return std::exp(-(features.row(a) - features.row(b)).norm() /
                    params.gamma);
  };
  if (params.neighborhood_radius > 0.0) {
    for (int a = 0; a < decomp.size(); ++a)
      for (int b = a + 1; b < decomp.size(); ++b)
        if ((decomp.superpixels[a].barycenter -
             decomp.superpixels[b].barycenter)
                .norm() <= params.neighborhood_radius)
          edges.push_back({a, b, weight(a, b)});
  } else {
    for (int a = 0; a < decomp.size(); ++a)
      for (const int b : decomp.adjacency[a])
        if (a < b) edges.push_back({a, b, weight(a, b)});
  }
  return edges;
}

/// Exact binary subproblem: switch-to-alpha against the current labeling.
std::vector<int> expansion_move(const std::vector<int>& labels, int alpha,
                                const LabelFusionMap& fusion,
                                const std::vector<WeightedEdge>& edges) {
  const int n = static_cast<int>(labels.size());
  std::vector<double> keep_cost(n), take_cost(n);
  for (int i = 0; i < n; ++i) {
    keep_cost[i] = 1.0 - fusion.probabilities(i, labels[i]);
    take_cost[i] = 1.0 - fusion.probabilities(i, alpha);
  }

  MaxFlowGraph graph(n);
  for (const auto& edge : edges) {
    const double e00 = labels[edge.a] != labels[edge.b] ? edge.weight : 0.0;
    const double e01 = labels[edge.a] != alpha ? edge.weight : 0.0;
    const double e10 = labels[edge.b] != alpha ? edge.weight : 0.0;
    const double e11 = 0.0;
    if (e00 + e11 > e01 + e10 + 1e-12)
      throw std::logic_error("expansion move pairwise term not submodular");
    take_cost[edge.a] += e10 - e00;
    take_cost[edge.b] += e11 - e10;
    graph.add_edge(edge.a, edge.b, e01 + e10 - e00 - e11);
  }
  for (int i = 0; i < n; ++i) {
    const double shift = std::min(keep_cost[i], take_cost[i]);
    graph.add_terminal(i, take_cost[i] - shift, keep_cost[i] - shift);
  }
  graph.solve();

  std::vector<int> moved(labels);
  for (int i = 0; i < n; ++i)
    if (!graph.source_side(i)) moved[i] = alpha;
  return moved;
}

}  // namespace

double labeling_energy(const std::vector<int>& labels,
                       const LabelFusionMap& fusion,
                       const Decomposition& decomp,
                       const FeatureTable& features,
                       const RegularizeParams& params) {
  if (static_cast<int>(labels.size()) != decomp.size())
    throw DomainError("labeling does not cover the decomposition");
  double energy = 0.0;
  for (int i = 0; i < decomp.size(); ++i)
    energy += 1.0 - fusion.probabilities(i, labels[i]);
  for (const auto& edge : build_edges(decomp, features, params))
    if (labels[edge.a] != labels[edge.b]) energy += edge.weight;
  return energy;
}

std::vector<int> regularize(const LabelFusionMap& fusion,
                            const Decomposition& decomp,
                            const FeatureTable& features,
                            const RegularizeParams& params,
                            std::vector<double>* sweep_energies) {
  if (params.gamma <= 0.0) throw DomainError("gamma must be positive");
  if (fusion.superpixel_count() != decomp.size())
    throw DomainError("fusion map does not cover the decomposition");

  const std::vector<WeightedEdge> edges =
      build_edges(decomp, features, params);
  std::vector<int> labels = argmax_label(fusion);
  double energy = labeling_energy(labels, fusion, decomp, features, params);
  if (sweep_energies) {
    sweep_energies->clear();
    sweep_energies->push_back(energy);
  }

  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    bool improved = false;
    for (int alpha = 0; alpha < fusion.label_count(); ++alpha) {
      std::vector<int> moved = expansion_move(labels, alpha, fusion, edges);
      const double moved_energy =
          labeling_energy(moved, fusion, decomp, features, params);
      if (moved_energy < energy) {
        labels = std::move(moved);
        energy = moved_energy;
        improved = true;
      }
    }
    if (sweep_energies) sweep_energies->push_back(energy);
    if (!improved) break;
  }
  return labels;
}

}  // namespace spm
