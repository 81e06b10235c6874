#include "disagg/maxflow.hpp"

#include <limits>
#include <queue>

namespace disagg {

MaxFlow::MaxFlow(int n_nodes) : graph_(n_nodes) {}

int MaxFlow::add_edge(int from, int to, std::int64_t cap) {
  const int a = static_cast<int>(graph_[from].size());
  const int b = static_cast<int>(graph_[to].size());
  graph_[from].push_back({to, cap, b});
  graph_[to].push_back({from, 0, a});
  edge_loc_.emplace_back(from, a);
  return static_cast<int>(edge_loc_.size()) - 1;
}

bool MaxFlow::bfs(int s, int t) {
  level_.assign(graph_.size(), -1);
  std::queue<int> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const Edge& e : graph_[v]) {
      if (e.cap > 0 && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        q.push(e.to);
      }
    }
  }
  return level_[t] >= 0;
}

std::int64_t MaxFlow::dfs(int v, int t, std::int64_t limit) {
  if (v == t) return limit;
  for (int& i = iter_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
    Edge& e = graph_[v][i];
    if (e.cap <= 0 || level_[e.to] != level_[v] + 1) continue;
    const std::int64_t d = dfs(e.to, t, std::min(limit, e.cap));
    if (d > 0) {
      e.cap -= d;
      graph_[e.to][e.rev].cap += d;
      return d;
    }
  }
  return 0;
}

std::int64_t MaxFlow::max_flow(int s, int t) {
  std::int64_t flow = 0;
  while (bfs(s, t)) {
    iter_.assign(graph_.size(), 0);
    while (true) {
      const std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max());
      if (f == 0) break;
      flow += f;
    }
  }
  return flow;
}

std::int64_t MaxFlow::flow_on(int edge_index) const {
  const auto [node, slot] = edge_loc_[edge_index];
  const Edge& e = graph_[node][slot];
  return graph_[e.to][e.rev].cap;  // reverse capacity equals pushed flow
}

}  // namespace disagg
