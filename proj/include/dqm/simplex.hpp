// Derivative-free Nelder-Mead simplex search with an optional projection
// applied to every trial point (used to keep Bloch vectors inside the ball).

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dqm {

struct SimplexOptions {
  double initial_step = 0.1;
  /// Converged when the largest vertex distance from the best vertex drops below this.
  double diameter_tol = 1e-9;
  /// Converged when the best value improves by less than this over `stall_window` iterations.
  double stall_tol = 1e-12;
  int stall_window = 50;
  int max_iterations = 5000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;
using Projection = std::function<void(std::span<double>)>;

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& options = {},
                          const Projection& project = {});

}  // namespace dqm
