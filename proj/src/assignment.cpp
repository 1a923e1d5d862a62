#include "kinlab/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinlab/errors.hpp"

namespace kinlab {

std::vector<int> solve_assignment(const std::vector<double>& cost, int n) {
  if (n < 1) throw ArgumentError("assignment: n must be >= 1");
  if (cost.size() != static_cast<std::size_t>(n) * n)
    throw ArgumentError("assignment: cost matrix size mismatch");
  const double inf = std::numeric_limits<double>::infinity();
  auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; };

  // Potentials u (rows, 1-based) and v (columns, with virtual column 0);
  // p[j] = row currently assigned to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<double> solve_transportation(const std::vector<double>& supply,
                                         const std::vector<double>& demand,
                                         const std::vector<double>& cost) {
  const int na = static_cast<int>(supply.size());
  const int nb = static_cast<int>(demand.size());
  if (na < 1 || nb < 1) throw ArgumentError("transportation: empty marginal");
  if (cost.size() != static_cast<std::size_t>(na) * nb)
    throw ArgumentError("transportation: cost matrix size mismatch");
  double total_a = 0.0, total_b = 0.0;
  for (double s : supply) {
    if (!(s > 0.0)) throw ArgumentError("transportation: supplies must be positive");
    total_a += s;
  }
  for (double d : demand) {
    if (!(d > 0.0)) throw ArgumentError("transportation: demands must be positive");
    total_b += d;
  }
  if (std::abs(total_a - total_b) > 1e-9)
    throw ArgumentError("transportation: unbalanced marginals");

  const double inf = std::numeric_limits<double>::infinity();
  auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * nb + j]; };

  std::vector<double> flow(static_cast<std::size_t>(na) * nb, 0.0);
  std::vector<double> rem_a = supply, rem_b = demand;
  // Node layout for Dijkstra: rows 0..na-1, then columns na..na+nb-1.
  const int nn = na + nb;
  std::vector<double> phi(nn, 0.0);  // Johnson potentials; costs >= 0 assumed
  double min_cost = *std::min_element(cost.begin(), cost.end());
  if (min_cost < 0.0)
    throw ArgumentError("transportation: negative costs unsupported");

  std::vector<double> dist(nn);
  std::vector<int> parent(nn);
  std::vector<char> visited(nn);

  // Residual supplies/demands below node_tol are treated as satisfied; the
  // leftover is far inside the 1e-10 marginal tolerance of couplings.
  const double node_tol = 1e-13 * total_a;
  const int max_augment = 20 * (na + nb) + 64;
  for (int round = 0; round < max_augment; ++round) {
    bool any_source = false;
    for (int i = 0; i < na; ++i)
      if (rem_a[i] > node_tol) { any_source = true; break; }
    bool any_target = false;
    for (int j = 0; j < nb; ++j)
      if (rem_b[j] > node_tol) { any_target = true; break; }
    if (!any_source || !any_target) return flow;

    // Multi-source Dijkstra from all rows with remaining supply.
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(visited.begin(), visited.end(), 0);
    for (int i = 0; i < na; ++i)
      if (rem_a[i] > node_tol) dist[i] = 0.0;

    for (int it = 0; it < nn; ++it) {
      int u = -1;
      double best = inf;
      for (int k = 0; k < nn; ++k)
        if (!visited[k] && dist[k] < best) {
          best = dist[k];
          u = k;
        }
      if (u < 0) break;
      visited[u] = 1;
      if (u < na) {
        for (int j = 0; j < nb; ++j) {
          int vno = na + j;
          if (visited[vno]) continue;
          double w = c(u, j) + phi[u] - phi[vno];
          if (w < 0.0) w = 0.0;  // clamp fp jitter in reduced costs
          if (dist[u] + w < dist[vno]) {
            dist[vno] = dist[u] + w;
            parent[vno] = u;
          }
        }
      } else {
        int j = u - na;
        for (int i = 0; i < na; ++i) {
          if (visited[i]) continue;
          if (flow[static_cast<std::size_t>(i) * nb + j] <= 0.0) continue;
          double w = -c(i, j) + phi[u] - phi[i];
          if (w < 0.0) w = 0.0;
          if (dist[u] + w < dist[i]) {
            dist[i] = dist[u] + w;
            parent[i] = u;
          }
        }
      }
    }

    // Cheapest reachable column with unmet demand.
    int target = -1;
    double best = inf;
    for (int j = 0; j < nb; ++j) {
      int vno = na + j;
      if (rem_b[j] > node_tol && dist[vno] < best) {
        best = dist[vno];
        target = vno;
      }
    }
    if (target < 0)
      throw ConvergenceError("transportation: no augmenting path found", {});

    // Bottleneck along the path.
    double push = rem_b[target - na];
    int node = target;
    while (parent[node] >= 0) {
      int prev = parent[node];
      if (prev >= na) {  // backward arc col->row carries existing flow
        push = std::min(push,
                        flow[static_cast<std::size_t>(node) * nb + (prev - na)]);
      }
      node = prev;
    }
    push = std::min(push, rem_a[node]);

    // Apply the augmentation.
    rem_b[target - na] -= push;
    int cur = target;
    while (parent[cur] >= 0) {
      int prev = parent[cur];
      if (prev < na) {
        flow[static_cast<std::size_t>(prev) * nb + (cur - na)] += push;
      } else {
        flow[static_cast<std::size_t>(cur) * nb + (prev - na)] -= push;
      }
      cur = prev;
    }
    rem_a[cur] -= push;

    // Fold distances into the potentials (Johnson update).
    for (int k = 0; k < nn; ++k)
      if (dist[k] < inf) phi[k] += std::min(dist[k], best);
  }
  throw ConvergenceError("transportation: augmentation cap reached", {});
}

}  // namespace kinlab
