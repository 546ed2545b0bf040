#include "dqm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dqm {

namespace {

// Standard coefficients: reflection, expansion, contraction, shrink.
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& options,
                          const Projection& project) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");

  SimplexResult result;
  auto eval = [&](std::vector<double>& x) {
    if (project) project(x);
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  vals[0] = eval(pts[0]);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += options.initial_step;
    vals[i + 1] = eval(pts[i + 1]);
    // A projection can fold the step back onto the base point; try the other side.
    if (distance(pts[i + 1], pts[0]) < 0.25 * options.initial_step) {
      pts[i + 1] = x0;
      pts[i + 1][i] -= options.initial_step;
      vals[i + 1] = eval(pts[i + 1]);
    }
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> best_history;
  best_history.reserve(static_cast<std::size_t>(options.max_iterations) + 1);

  std::vector<double> centroid(n), trial(n), trial2(n);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    {
      std::vector<std::vector<double>> p2(n + 1);
      std::vector<double> v2(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        p2[k] = std::move(pts[order[k]]);
        v2[k] = vals[order[k]];
      }
      pts = std::move(p2);
      vals = std::move(v2);
    }

    best_history.push_back(vals[0]);
    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k) diameter = std::max(diameter, distance(pts[k], pts[0]));
    if (diameter < options.diameter_tol) {
      result.converged = true;
      break;
    }
    const auto window = static_cast<std::size_t>(options.stall_window);
    if (best_history.size() > window &&
        best_history[best_history.size() - 1 - window] - vals[0] < options.stall_tol) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[k][i] / static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + kReflect * (centroid[i] - pts[n][i]);
    const double fr = eval(trial);

    if (fr < vals[0]) {
      for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + kExpand * (trial[i] - centroid[i]);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[n] = trial2;
        vals[n] = fe;
      } else {
        pts[n] = trial;
        vals[n] = fr;
      }
      continue;
    }
    if (fr < vals[n - 1]) {
      pts[n] = trial;
      vals[n] = fr;
      continue;
    }
    // Outside contraction when the reflection beat the worst point, inside otherwise.
    const bool outside = fr < vals[n];
    for (std::size_t i = 0; i < n; ++i) {
      trial2[i] = outside ? centroid[i] + kContract * (trial[i] - centroid[i])
                          : centroid[i] + kContract * (pts[n][i] - centroid[i]);
    }
    const double fc = eval(trial2);
    if (fc < (outside ? fr : vals[n])) {
      pts[n] = trial2;
      vals[n] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) pts[k][i] = pts[0][i] + kShrink * (pts[k][i] - pts[0][i]);
      vals[k] = eval(pts[k]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  result.x = pts[best];
  result.value = vals[best];
  result.iterations = iter;
  return result;
}

}  // namespace dqm
