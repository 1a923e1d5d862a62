#pragma once

#include <vector>

namespace kinlab {

// Exact linear assignment on a dense n x n cost matrix (row-major) by the
// shortest-augmenting-path (Jonker-Volgenant style) method with potentials.
// Returns row_to_col; deterministic, ties resolved by lowest column index.
std::vector<int> solve_assignment(const std::vector<double>& cost, int n);

// Exact solution of the balanced transportation problem
//   minimize sum c_ij x_ij  s.t.  sum_j x_ij = supply_i, sum_i x_ij = demand_j
// by successive shortest augmenting paths with Johnson potentials.
// supply and demand must be positive with equal totals (within 1e-9).
// Returns the dense flow matrix (n_a x n_b, row-major).
std::vector<double> solve_transportation(const std::vector<double>& supply,
                                         const std::vector<double>& demand,
                                         const std::vector<double>& cost);

}  // namespace kinlab
