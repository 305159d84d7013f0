#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace delaycent {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_panels = std::size_t{1} << 16;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;   // sum of per-panel |K15 - G7| estimates
  std::size_t panels = 0;
};

/// Global adaptive Gauss-Kronrod (7/15) over the partition given by
/// `breakpoints` (strictly increasing, at least two). The panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// abs_tol; throws NumericError when max_panels is reached first. The
/// subdivision sequence depends only on the integrand values, so results are
/// reproducible bit for bit.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options);

/// Breakpoints 0, lo, 2lo, 4lo, ... up to `hi` (inclusive). Resolves features
/// at every scale between lo and hi with O(log(hi/lo)) initial panels.
std::vector<double> geometric_breakpoints(double lo, double hi);

}  // namespace delaycent
