#include "delaycent/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace delaycent {

namespace {

double tie_tolerance(const Eigen::VectorXd& indices) {
  return indices.size() ? kRankRelTol * indices.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

Ranking rank_indices(const Eigen::VectorXd& indices) {
  const int n = static_cast<int>(indices.size());
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return indices(a) > indices(b); });

  const double tol = tie_tolerance(indices);
  Ranking r;
  r.order.reserve(n);
  for (int start = 0; start < n;) {
    int end = start + 1;
    while (end < n && (indices(ids[start]) - indices(ids[end]) < tol ||
                       indices(ids[start]) == indices(ids[end]))) {
      ++end;
    }
    std::vector<int> group(ids.begin() + start, ids.begin() + end);
    std::sort(group.begin(), group.end());
    r.order.insert(r.order.end(), group.begin(), group.end());
    if (group.size() > 1) r.tie_groups.push_back(std::move(group));
    start = end;
  }
  return r;
}

int compare_ranked(const Eigen::VectorXd& indices, int a, int b) {
  const double diff = indices(a) - indices(b);
  const double tol = tie_tolerance(indices);
  if (diff >= tol && diff > 0.0) return 1;
  if (-diff >= tol && diff < 0.0) return -1;
  return 0;
}

}  // namespace delaycent
