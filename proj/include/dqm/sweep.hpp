// Lambda sweeps over the variational minimum, plus their CSV form.

#pragma once

#include "dqm/model.hpp"
#include "dqm/variational.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dqm {

inline constexpr const char* kSweepCsvHeader = "lambda,ax_A,ay_A,az_A,ax_B,ay_B,az_B,m,ms,norm,converged,restarts";

struct SweepOptions {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double step = 0.01;
  int jobs = 1;
  /// Densify to refine_step within +-refine_halfwidth of every threshold
  /// crossing, then bisect the crossing down to bisect_resolution.
  bool refine = true;
  double refine_step = 0.001;
  double refine_halfwidth = 0.05;
  double bisect_resolution = 1e-4;
  double threshold = 1e-4;
  MinimizeOptions minimize;
};

/// Coarse grid lambda_min + k step, k = 0.. while <= lambda_max. Empty when max < min.
std::vector<double> sweep_grid(double lambda_min, double lambda_max, double step);

/// Per-point seed: depends on the base seed and lambda only, never on scheduling.
std::uint64_t point_seed(std::uint64_t base, double lambda);

SweepRecord solve_point(const ModelConfig& config, double lambda, const MinimizeOptions& options);

/// Solves every lambda on a pool of `jobs` threads; output is sorted by lambda.
std::vector<SweepRecord> solve_points(const ModelConfig& config, const std::vector<double>& lambdas,
                                      const MinimizeOptions& options, int jobs);

std::vector<SweepRecord> run_sweep(const ModelConfig& config, const SweepOptions& options);

/// %.12g
std::string format_real(double v);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

/// One-line JSON record of a critical fit.
std::string fit_json(const CriticalFit& fit, OrderParameter which);

}  // namespace dqm
