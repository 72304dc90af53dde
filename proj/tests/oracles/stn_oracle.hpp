#pragma once

// Brute-force STN oracle: enumerate every simple cycle of the distance graph
// and report whether one has negative weight. Only for small networks.

#include <algorithm>
#include <vector>

#include "tnplan/stn.hpp"

namespace tnplan::oracle {

inline bool has_negative_cycle(int num_nodes, const std::vector<StnEdge>& edges, double tol = 1e-9) {
  std::vector<std::vector<double>> w(num_nodes, std::vector<double>(num_nodes, kInf));
  for (const auto& e : edges) {
    if (e.from == e.to) {
      if (e.weight < -tol) return true;
      continue;
    }
    w[e.from][e.to] = std::min(w[e.from][e.to], e.weight);
  }
  std::vector<char> on_path(num_nodes, 0);
  bool found = false;
  // Cycles are rooted at their smallest node to visit each one once.
  auto dfs = [&](auto&& self, int root, int node, double acc) -> void {
    if (found) return;
    for (int next = root; next < num_nodes; ++next) {
      if (w[node][next] == kInf) continue;
      if (next == root) {
        if (acc + w[node][next] < -tol) found = true;
        continue;
      }
      if (on_path[next]) continue;
      on_path[next] = 1;
      self(self, root, next, acc + w[node][next]);
      on_path[next] = 0;
      if (found) return;
    }
  };
  for (int root = 0; root < num_nodes && !found; ++root) {
    on_path[root] = 1;
    dfs(dfs, root, root, 0.0);
    on_path[root] = 0;
  }
  return found;
}

}  // namespace tnplan::oracle
