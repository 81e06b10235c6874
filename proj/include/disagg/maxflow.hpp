#pragma once

#include <cstdint>
#include <vector>

namespace disagg {

// Dinic max-flow on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n_nodes);

  // Adds a directed edge and its zero-capacity reverse; returns edge index.
  int add_edge(int from, int to, std::int64_t cap);

  std::int64_t max_flow(int source, int sink);

  std::int64_t flow_on(int edge_index) const;

 private:
  struct Edge {
    int to;
    std::int64_t cap;
    int rev;
  };
  bool bfs(int s, int t);
  std::int64_t dfs(int v, int t, std::int64_t limit);

  std::vector<std::vector<Edge>> graph_;
  std::vector<std::pair<int, int>> edge_loc_;  // (node, slot) of each added edge
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace disagg
