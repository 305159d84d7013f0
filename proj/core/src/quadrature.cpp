#include "delaycent/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include "delaycent/errors.hpp"

namespace delaycent {

namespace {

// Kronrod abscissae on [0, 1]; odd positions (1, 3, 5) are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

Panel gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int k = 0; k < 7; ++k) {
    const double dx = half * kXgk[k];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[k] * pair;
    if (k % 2 == 1) gauss += kWg[k / 2] * pair;
  }
  Panel p{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
  if (!std::isfinite(p.value)) {
    std::ostringstream os;
    os << "quadrature: non-finite integrand on [" << a << ", " << b << "]";
    throw NumericError(os.str());
  }
  return p;
}

struct LargerError {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options) {
  if (breakpoints.size() < 2) throw InputError("quadrature: need at least two breakpoints");
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > breakpoints[k - 1])) {
      throw InputError("quadrature: breakpoints must be strictly increasing");
    }
  }
  if (!(options.abs_tol > 0.0)) throw InputError("quadrature: tolerance must be positive");

  std::priority_queue<Panel, std::vector<Panel>, LargerError> queue;
  double total_error = 0.0;
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    Panel p = gauss_kronrod_15(f, breakpoints[k - 1], breakpoints[k]);
    total_error += p.error;
    queue.push(p);
  }

  while (total_error > options.abs_tol) {
    if (queue.size() >= options.max_panels) {
      std::ostringstream os;
      os << "quadrature: panel budget " << options.max_panels
         << " exhausted with error estimate " << total_error << " > " << options.abs_tol;
      throw NumericError(os.str());
    }
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NumericError("quadrature: panel cannot be subdivided further");
    }
    Panel left = gauss_kronrod_15(f, worst.a, mid);
    Panel right = gauss_kronrod_15(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  std::vector<Panel> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });

  QuadratureResult result;
  result.panels = panels.size();
  for (const Panel& p : panels) {
    result.value += p.value;
    result.error += p.error;
  }
  return result;
}

std::vector<double> geometric_breakpoints(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw InputError("geometric_breakpoints: need 0 < lo < hi");
  std::vector<double> points{0.0};
  for (double x = lo; x < hi; x *= 2.0) points.push_back(x);
  points.push_back(hi);
  return points;
}

}  // namespace delaycent
