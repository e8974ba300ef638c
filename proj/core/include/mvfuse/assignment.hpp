#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mvfuse {

// Minimum-cost assignment on a rectangular cost matrix (Hungarian method,
// O(n^2 m)). Returns, for each row, the assigned column or -1. Every row is
// assigned when rows <= cols, every column when rows > cols.
// Entries must be finite.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

// Total cost of an assignment returned by solve_assignment.
double assignment_cost(const Eigen::MatrixXd& cost,
                       const std::vector<int>& assignment);

}  // namespace mvfuse
