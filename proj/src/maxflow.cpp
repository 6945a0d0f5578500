// SPDX-License-Identifier: Apache-2.0

#include "spm/maxflow.hpp"

#include <deque>
#include <limits>

namespace spm {

namespace {
constexpr double kResidualEps = 1e-12;
}

MaxFlowGraph::MaxFlowGraph(int nodes)
    : source_(nodes), sink_(nodes + 1), arcs_(nodes + 2) {}

void MaxFlowGraph::add_edge(int a, int b, double cap_ab, double cap_ba) {
  Arc forward{b, static_cast<int>(arcs_[b].size()), cap_ab};
  Arc backward{a, static_cast<int>(arcs_[a].size()), cap_ba};
  arcs_[a].push_back(forward);
  arcs_[b].push_back(backward);
}

void MaxFlowGraph::add_terminal(int node, double from_source, double to_sink) {
  if (from_source > 0.0) add_edge(source_, node, from_source);
  if (to_sink > 0.0) add_edge(node, sink_, to_sink);
}

bool MaxFlowGraph::bfs_levels() {
  level_.assign(arcs_.size(), -1);
  std::deque<int> queue{source_};
  level_[source_] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Arc& arc : arcs_[u]) {
      if (arc.cap > kResidualEps && level_[arc.to] < 0) {
        level_[arc.to] = level_[u] + 1;
        queue.push_back(arc.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

double MaxFlowGraph::push(int node, double limit) {
  if (node == sink_) return limit;
  for (int& idx = next_arc_[node]; idx < static_cast<int>(arcs_[node].size());
       ++idx) {
    Arc& arc = arcs_[node][idx];
    if (arc.cap <= kResidualEps || level_[arc.to] != level_[node] + 1) continue;
    const double pushed = push(arc.to, std::min(limit, arc.cap));
    if (pushed > 0.0) {
      arc.cap -= pushed;
      arcs_[arc.to][arc.rev].cap += pushed;
      return pushed;
    }
  }
  return 0.0;
}

double MaxFlowGraph::solve() {
  double flow = 0.0;
  while (bfs_levels()) {
    next_arc_.assign(arcs_.size(), 0);
    while (true) {
      const double pushed =
          push(source_, std::numeric_limits<double>::infinity());
      if (pushed <= 0.0) break;
      flow += pushed;
    }
  }
  return flow;
}

bool MaxFlowGraph::source_side(int node) const {
  // level_ holds the last BFS, which failed to reach the sink; reachable
  // nodes are exactly the source side of the min cut.
  return level_[node] >= 0;
}

}  // namespace spm
