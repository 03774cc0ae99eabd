#pragma once

#include <vector>

#include "flock/topology.hpp"

namespace flock {

/// Exact minimum-cost perfect matching on a dense square cost matrix by
/// shortest augmenting paths with dual potentials, cubic time overall.
/// Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const Matrix& cost);

/// Total cost of the optimal matching, sum of cost(i, match[i]).
double assignment_cost(const Matrix& cost);

}  // namespace flock
