// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_MAXFLOW_HPP
#define SPM_MAXFLOW_HPP

#include <vector>

namespace spm {

/// Exact s-t max-flow / min-cut on a small dense-ish graph, Dinic's
/// algorithm with double capacities. Nodes are 0..n-1; the source and sink
/// are implicit and reached through add_terminal.
class MaxFlowGraph {
 public:
  explicit MaxFlowGraph(int nodes);

  /// Capacity from the source into `node` and from `node` into the sink.
  void add_terminal(int node, double from_source, double to_sink);

  /// Directed capacity a->b (and optionally b->a on the same arc pair).
  void add_edge(int a, int b, double cap_ab, double cap_ba = 0.0);

  /// Runs the flow computation; callable once.
  double solve();

  /// True when `node` stays reachable from the source in the residual graph
  /// (call after solve()).
  bool source_side(int node) const;

 private:
  struct Arc {
    int to;
    int rev;
    double cap;
  };

  bool bfs_levels();
  double push(int node, double limit);

  int source_;
  int sink_;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<int> level_;
  std::vector<int> next_arc_;
};

}  // namespace spm

#endif  // SPM_MAXFLOW_HPP
