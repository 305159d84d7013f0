#pragma once

#include <vector>

#include <Eigen/Core>

namespace delaycent {

/// Relative tie tolerance: indices within kRankRelTol * max|index| of the
/// first member of a group are tied.
inline constexpr double kRankRelTol = 1e-9;

struct Ranking {
  std::vector<int> order;                     // ids, descending index
  std::vector<std::vector<int>> tie_groups;   // groups of size >= 2, ids ascending
};

/// Descending order; ties (see kRankRelTol) are listed by ascending id. The
/// ranked sequence is non-increasing up to the tie tolerance.
Ranking rank_indices(const Eigen::VectorXd& indices);

/// Strict comparison used for flip detection: +1 if a is ahead of b by more
/// than the tie tolerance, -1 if behind, 0 if tied.
int compare_ranked(const Eigen::VectorXd& indices, int a, int b);

}  // namespace delaycent
