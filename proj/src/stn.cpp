#include "tnplan/stn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace tnplan {

namespace {
// Relaxations smaller than this are ignored, so zero-weight cycles built from
// rounded sums never register as negative.
constexpr double kRelaxTolerance = 1e-10;
}  // namespace

Stn::Stn() : out_(1), in_(1), potential_(1, 0.0) {}

Stn::Stn(int extra_nodes) : Stn() {
  for (int i = 0; i < extra_nodes; ++i) add_node();
}

int Stn::add_node() {
  int id = num_nodes();
  out_.emplace_back();
  in_.emplace_back();
  // Any value >= potential(zero) keeps the new implicit edge id -> zero feasible.
  potential_.push_back(potential_[kZero]);
  out_[id].push_back({kZero, 0.0});
  in_[kZero].push_back({id, 0.0});
  return id;
}

void Stn::add_constraint(int i, int j, double lb, double ub) {
  if (i < 0 || j < 0 || i >= num_nodes() || j >= num_nodes())
    throw std::out_of_range("STN constraint references unknown node");
  if (lb > ub)
    throw InconsistentConstraint("empty interval [" + std::to_string(lb) + ", " + std::to_string(ub) + "]");
  constraints_.push_back({i, j, lb, ub});
  if (std::isfinite(ub)) add_edge(i, j, ub);
  if (std::isfinite(lb)) add_edge(j, i, -lb);
}

void Stn::add_edge(int u, int v, double w) {
  out_[u].push_back({v, w});
  in_[v].push_back({u, w});
  if (!consistent_) return;
  if (potential_[u] + w >= potential_[v] - kRelaxTolerance) return;

  // Potentials were feasible before this edge, so any negative cycle must use
  // it; that happens exactly when propagation from v improves u.
  std::vector<int> pred(num_nodes(), -1);
  std::vector<char> queued(num_nodes(), 0);
  std::deque<int> queue;
  potential_[v] = potential_[u] + w;
  pred[v] = u;
  queue.push_back(v);
  queued[v] = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    queued[x] = 0;
    for (const auto& arc : out_[x]) {
      double cand = potential_[x] + arc.weight;
      if (cand >= potential_[arc.to] - kRelaxTolerance) continue;
      if (arc.to == u) {
        consistent_ = false;
        witness_.clear();
        for (int n = x; n != -1 && n != u && witness_.size() <= static_cast<std::size_t>(num_nodes()); n = pred[n])
          witness_.push_back(n);
        witness_.push_back(u);
        std::reverse(witness_.begin(), witness_.end());
        return;
      }
      potential_[arc.to] = cand;
      pred[arc.to] = x;
      if (!queued[arc.to]) {
        queue.push_back(arc.to);
        queued[arc.to] = 1;
      }
    }
  }
}

std::vector<StnEdge> Stn::edges() const {
  std::vector<StnEdge> result;
  for (int u = 0; u < num_nodes(); ++u)
    for (const auto& arc : out_[u]) result.push_back({u, arc.to, arc.weight});
  return result;
}

std::vector<double> Stn::shortest_from(int source, bool reversed) const {
  const auto& adj = reversed ? in_ : out_;
  std::vector<double> dist(num_nodes(), kInf);
  std::vector<char> queued(num_nodes(), 0);
  std::deque<int> queue;
  dist[source] = 0.0;
  queue.push_back(source);
  queued[source] = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    queued[x] = 0;
    for (const auto& arc : adj[x]) {
      double cand = dist[x] + arc.weight;
      if (cand >= dist[arc.to] - kRelaxTolerance) continue;
      dist[arc.to] = cand;
      if (!queued[arc.to]) {
        queue.push_back(arc.to);
        queued[arc.to] = 1;
      }
    }
  }
  return dist;
}

StnVerdict Stn::check_consistency() const {
  StnVerdict verdict;
  if (!consistent_) {
    verdict.consistent = false;
    verdict.negative_cycle = witness_;
    return verdict;
  }
  // earliest(j) = -dist(j -> zero), computed on the reversed graph.
  auto to_zero = shortest_from(kZero, /*reversed=*/true);
  verdict.schedule.resize(num_nodes());
  for (int j = 0; j < num_nodes(); ++j) verdict.schedule[j] = to_zero[j] == 0.0 ? 0.0 : -to_zero[j];
  return verdict;
}

double Stn::max_difference(int i, int j) const {
  if (!consistent_) throw std::logic_error("distance query on inconsistent STN");
  return shortest_from(i, false)[j];
}

double Stn::min_difference(int i, int j) const {
  if (!consistent_) throw std::logic_error("distance query on inconsistent STN");
  return -shortest_from(j, false)[i];
}

}  // namespace tnplan
