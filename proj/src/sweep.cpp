#include "dqm/sweep.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dqm {

namespace {

constexpr double kSameLambda = 1e-9;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double order_value(const SweepRecord& r, OrderParameter which) { return which == OrderParameter::M ? r.m : r.m_s; }

bool contains(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x - kSameLambda);
  return it != sorted.end() && std::abs(*it - x) <= kSameLambda;
}

// Adjacent converged pairs (a, b) where exactly one side is ordered.
std::vector<std::pair<const SweepRecord*, const SweepRecord*>> crossings(const std::vector<SweepRecord>& sorted,
                                                                         OrderParameter which, double threshold) {
  std::vector<const SweepRecord*> ok;
  for (const auto& r : sorted)
    if (r.converged) ok.push_back(&r);
  std::vector<std::pair<const SweepRecord*, const SweepRecord*>> out;
  for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
    const bool a = order_value(*ok[i], which) >= threshold;
    const bool b = order_value(*ok[i + 1], which) >= threshold;
    if (a != b) out.emplace_back(ok[i], ok[i + 1]);
  }
  return out;
}

void merge(std::vector<SweepRecord>& into, std::vector<SweepRecord> more) {
  into.insert(into.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  std::sort(into.begin(), into.end(), [](const SweepRecord& a, const SweepRecord& b) { return a.lambda < b.lambda; });
}

std::vector<double> lambdas_of(const std::vector<SweepRecord>& records) {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.lambda);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> sweep_grid(double lambda_min, double lambda_max, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("sweep: step must be positive");
  if (!std::isfinite(lambda_min) || !std::isfinite(lambda_max)) throw std::invalid_argument("sweep: invalid range");
  if (lambda_min < 0.0) throw std::invalid_argument("sweep: lambda must be non-negative");
  std::vector<double> out;
  if (lambda_max < lambda_min) return out;
  const auto count = static_cast<long long>(std::floor((lambda_max - lambda_min) / step + 1e-9));
  if (count > 1000000) throw std::invalid_argument("sweep: more than 10^6 grid points");
  for (long long k = 0; k <= count; ++k) out.push_back(lambda_min + static_cast<double>(k) * step);
  return out;
}

std::uint64_t point_seed(std::uint64_t base, double lambda) {
  return mix(base ^ mix(static_cast<std::uint64_t>(std::llround(lambda * 1e9))));
}

SweepRecord solve_point(const ModelConfig& config, double lambda, const MinimizeOptions& options) {
  MinimizeOptions opts = options;
  opts.seed = point_seed(options.seed, lambda);
  const MinimizeResult res = minimize_norm(config.build(lambda), config.ansatz, opts);
  const OrderParameters op = order_parameters(res.ansatz);
  SweepRecord r;
  r.lambda = lambda;
  r.alpha_a = res.ansatz.a;
  r.alpha_b = res.ansatz.kind == AnsatzKind::Uniform ? res.ansatz.a : res.ansatz.b;
  r.m = op.m;
  r.m_s = op.m_s;
  r.residual_norm = res.residual_norm;
  r.converged = res.converged;
  r.restarts_used = res.restarts_used;
  return r;
}

std::vector<SweepRecord> solve_points(const ModelConfig& config, const std::vector<double>& lambdas,
                                      const MinimizeOptions& options, int jobs) {
  std::vector<SweepRecord> out(lambdas.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < lambdas.size();) {
      try {
        out[i] = solve_point(config, lambdas[i], options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = lambdas.size();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n, lambdas.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) { return a.lambda < b.lambda; });
  return out;
}

std::vector<SweepRecord> run_sweep(const ModelConfig& config, const SweepOptions& options) {
  const auto grid = sweep_grid(options.lambda_min, options.lambda_max, options.step);
  std::vector<SweepRecord> records = solve_points(config, grid, options.minimize, options.jobs);
  if (!options.refine || records.size() < 2) return records;

  // Dense points around each coarse crossing.
  std::vector<double> have = lambdas_of(records);
  std::vector<double> extra;
  for (auto which : {OrderParameter::M, OrderParameter::Ms}) {
    for (const auto& [a, b] : crossings(records, which, options.threshold)) {
      const double mid = 0.5 * (a->lambda + b->lambda);
      const double lo = std::max(options.lambda_min, mid - options.refine_halfwidth);
      const double hi = std::min(options.lambda_max, mid + options.refine_halfwidth);
      for (auto k = static_cast<long long>(std::ceil(lo / options.refine_step - 1e-9));; ++k) {
        const double x = static_cast<double>(k) * options.refine_step;
        if (x > hi + 1e-12) break;
        if (!contains(have, x) && std::none_of(extra.begin(), extra.end(), [&](double e) {
              return std::abs(e - x) <= kSameLambda;
            }))
          extra.push_back(x);
      }
    }
  }
  std::sort(extra.begin(), extra.end());
  merge(records, solve_points(config, extra, options.minimize, options.jobs));

  // Bisect every remaining crossing wider than the target resolution.
  for (int round = 0; round < 64; ++round) {
    std::vector<double> mids;
    for (auto which : {OrderParameter::M, OrderParameter::Ms}) {
      for (const auto& [a, b] : crossings(records, which, options.threshold)) {
        if (b->lambda - a->lambda <= options.bisect_resolution * (1.0 + 1e-9)) continue;
        const double mid = 0.5 * (a->lambda + b->lambda);
        if (std::none_of(mids.begin(), mids.end(), [&](double e) { return std::abs(e - mid) <= kSameLambda; }))
          mids.push_back(mid);
      }
    }
    if (mids.empty()) break;
    std::sort(mids.begin(), mids.end());
    merge(records, solve_points(config, mids, options.minimize, options.jobs));
  }
  return records;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    out << format_real(r.lambda);
    for (double v : {r.alpha_a.x, r.alpha_a.y, r.alpha_a.z, r.alpha_b.x, r.alpha_b.y, r.alpha_b.z, r.m, r.m_s,
                     r.residual_norm})
      out << ',' << format_real(v);
    out << ',' << (r.converged ? 1 : 0) << ',' << r.restarts_used << '\n';
  }
  if (!out) throw std::runtime_error("failed writing sweep CSV");
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw std::invalid_argument("sweep CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw std::invalid_argument("line 1: unexpected sweep CSV header");
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 12) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 12 columns, got " +
                                  std::to_string(cells.size()));
    }
    double v[10];
    try {
      for (int i = 0; i < 10; ++i) {
        std::size_t used = 0;
        v[i] = std::stod(cells[static_cast<std::size_t>(i)], &used);
        if (used != cells[static_cast<std::size_t>(i)].size()) throw std::invalid_argument("trailing text");
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed number");
    }
    SweepRecord r;
    r.lambda = v[0];
    r.alpha_a = {v[1], v[2], v[3]};
    r.alpha_b = {v[4], v[5], v[6]};
    r.m = v[7];
    r.m_s = v[8];
    r.residual_norm = v[9];
    const std::string& c = cells[10];
    if (c == "1" || c == "true") r.converged = true;
    else if (c == "0" || c == "false") r.converged = false;
    else throw std::invalid_argument("line " + std::to_string(line_no) + ": converged must be 0 or 1");
    try {
      r.restarts_used = std::stoi(cells[11]);
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed restart count");
    }
    out.push_back(r);
  }
  return out;
}

std::string fit_json(const CriticalFit& fit, OrderParameter which) {
  nlohmann::json j = {{"which", which == OrderParameter::M ? "m" : "ms"},
                      {"lambda_c", fit.lambda_c},
                      {"beta", fit.beta},
                      {"window", {fit.lambda_lo, fit.lambda_hi}},
                      {"r_squared", fit.r_squared},
                      {"points", fit.points},
                      {"amplitude", fit.amplitude}};
  return j.dump();
}

}  // namespace dqm
