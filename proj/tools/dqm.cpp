// dqm: sweeps, fits, effective operators, exact oracle and Landau scans.
//
// Exit codes: 0 ok, 1 usage/config error, 2 fit failure, 3 resource cap.

#include "dqm/effective_ops.hpp"
#include "dqm/model.hpp"
#include "dqm/oracle.hpp"
#include "dqm/problem_io.hpp"
#include "dqm/sweep.hpp"
#include "dqm/variational.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

constexpr int kUsageError = 1;
constexpr int kFitFailure = 2;
constexpr int kResourceCap = 3;

struct ModelFlags {
  std::string config;
  std::optional<int> z;
  std::optional<bool> renormalize;
  std::optional<std::string> ansatz;
  std::optional<double> lambda;

  void add(CLI::App* cmd, bool with_ansatz, bool with_lambda) {
    cmd->add_option("--config", config, "key = value model file (defaults: z=6, renormalize=true)");
    cmd->add_option("--z", z, "coordination number");
    cmd->add_option("--renormalize", renormalize, "divide bond jumps by sqrt(z-1) (true|false)");
    if (with_ansatz) cmd->add_option("--ansatz", ansatz, "uniform|bipartite");
    if (with_lambda) cmd->add_option("--lambda", lambda, "anisotropy");
  }

  dqm::ModelConfig resolve() const {
    dqm::ModelConfig cfg = config.empty() ? dqm::ModelConfig{} : dqm::load_model_config(config);
    if (z) cfg.lattice.z = *z;
    if (renormalize) cfg.lattice.renormalize = *renormalize;
    if (ansatz) cfg.ansatz = dqm::parse_ansatz_kind(*ansatz);
    if (lambda) cfg.lambda = *lambda;
    cfg.lattice.validate();
    if (cfg.ansatz == dqm::AnsatzKind::Bipartite && !cfg.lattice.bipartite)
      throw std::invalid_argument("bipartite ansatz on a non-bipartite lattice");
    return cfg;
  }
};

std::unique_ptr<std::ostream> open_out(const std::string& path) {
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

int run_sweep(const ModelFlags& flags, dqm::SweepOptions opts, const std::string& out_path) {
  const dqm::ModelConfig cfg = flags.resolve();
  const auto records = dqm::run_sweep(cfg, opts);
  if (out_path.empty() || out_path == "-") {
    dqm::write_sweep_csv(std::cout, records);
  } else {
    auto out = open_out(out_path);
    dqm::write_sweep_csv(*out, records);
    std::cerr << "wrote " << records.size() << " points to " << out_path << '\n';
  }
  return 0;
}

int run_fit(const std::string& path, const std::string& which_s, dqm::CriticalFitOptions opts,
            const std::string& jsonl) {
  const dqm::OrderParameter which = dqm::parse_order_parameter(which_s);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const auto records = dqm::read_sweep_csv(in);
  const dqm::CriticalFit fit = dqm::fit_critical(records, which, opts);
  std::printf("lambda_c   %.6f\nbeta       %.6f\nwindow     [%.6f, %.6f]\nR^2        %.6f\npoints     %zu\n",
              fit.lambda_c, fit.beta, fit.lambda_lo, fit.lambda_hi, fit.r_squared, fit.points);
  const std::string record = dqm::fit_json(fit, which);
  std::cout << record << '\n';
  if (!jsonl.empty()) {
    std::ofstream out(jsonl, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to '" + jsonl + "'");
    out << record << '\n';
  }
  return 0;
}

int run_effective(const std::string& path, bool validate, double t_max) {
  const dqm::EliminationProblem p = dqm::load_elimination_problem(path);
  const dqm::EffectiveModel eff = dqm::eliminate(p);
  const int ns = p.system_spins, na = p.aux_spins;
  const dqm::ComplexOperator h_sys = dqm::strip_auxiliary(eff.h_eff, ns, na);

  std::cout << "# system spins " << ns << ", auxiliary spins " << na << " (auxiliaries stripped in the all-down block)\n";
  std::cout << "[H_eff]\n" << dqm::pauli_expansion(h_sys) << "# dense\n" << dqm::dense_matrix(h_sys);
  int printed = 0;
  for (std::size_t k = 0; k < eff.c_eff.size(); ++k) {
    const dqm::ComplexOperator& c = eff.c_eff[k];
    if (c.matrix().cwiseAbs().maxCoeff() < 1e-14) continue;
    const dqm::ComplexOperator c_sys = dqm::strip_auxiliary(c, ns, na);
    // Weight outside the |d..d><d..d| auxiliary block.
    const double off = std::sqrt(std::max(0.0, c.matrix().squaredNorm() - c_sys.matrix().squaredNorm()));
    std::cout << "[jump " << k << "]\n" << dqm::pauli_expansion(c_sys) << "# dense\n" << dqm::dense_matrix(c_sys);
    std::printf("# weight outside the auxiliary ground block: %.3g\n", off);
    ++printed;
  }
  if (printed == 0) std::cout << "# no effective jumps\n";
  if (validate) {
    const std::size_t dim = std::size_t{1} << ns;
    const auto rho0 = dqm::ComplexOperator::identity(dim) * dqm::Complex(1.0 / static_cast<double>(dim));
    const dqm::ValidationReport rep = dqm::validate_elimination(p, eff, rho0, t_max);
    std::printf("# validation: max trace distance %.6g over t <= %g (%zu steps)\n", rep.max_trace_distance, rep.t_max,
                rep.steps);
  }
  return 0;
}

int run_oracle(const ModelFlags& flags, int n, const std::string& topo, const std::string& out_path) {
  const dqm::ModelConfig cfg = flags.resolve();
  if (n > dqm::kMaxOracleSpins) {
    throw dqm::ResourceLimitError("cluster of " + std::to_string(n) + " spins exceeds the limit of " +
                                  std::to_string(dqm::kMaxOracleSpins));
  }
  const auto L = dqm::build_liouvillian(cfg.build(), n, dqm::parse_topology(topo));
  const auto rep = dqm::steady_states(L);
  std::printf("spins          %d\nbonds          %zu\nnull dimension %d\nspectral gap   %.10g\n", n, L.bonds.size(),
              rep.null_dimension, rep.spectral_gap);
  for (std::size_t k = 0; k < rep.steady_states.size(); ++k) {
    std::printf("steady state %zu populations:", k);
    const auto& m = rep.steady_states[k].matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) std::printf(" %.6g", m(i, i).real());
    std::printf("\n");
  }
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    *out << "re,im\n";
    for (const auto& e : rep.eigenvalues) *out << dqm::format_real(e.real()) << ',' << dqm::format_real(e.imag()) << '\n';
  }
  return 0;
}

int run_landau(const ModelFlags& flags, const std::string& dir, dqm::LandauOptions opts, const std::string& out_path) {
  const dqm::ModelConfig cfg = flags.resolve();
  const auto fit = dqm::landau_expansion(cfg.build(), dqm::parse_landau_direction(dir), opts);
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    *out << "phi,norm\n";
    for (const auto& [phi, v] : fit.phi_grid) *out << dqm::format_real(phi) << ',' << dqm::format_real(v) << '\n';
  }
  std::printf("lambda %.6g\nu0 %.10g\nu2 %.10g\nu4 %.10g\nrms %.3g\n", cfg.lambda, fit.u0, fit.u2, fit.u4,
              fit.residual);
  std::printf("u2 %s\n", fit.u2 < 0 ? "negative (ordered)" : "positive (disordered)");
  nlohmann::json j = {{"lambda", cfg.lambda}, {"direction", dir}, {"u0", fit.u0},
                      {"u2", fit.u2},         {"u4", fit.u4},       {"rms", fit.residual}};
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative spin lattices: variational steady states and effective jump operators"};
  app.require_subcommand(1);

  ModelFlags sweep_flags;
  dqm::SweepOptions sweep_opts;
  std::string sweep_out;
  bool no_refine = false;
  auto* sweep = app.add_subcommand("sweep", "variational minimum over a lambda grid, CSV out");
  sweep_flags.add(sweep, true, false);
  sweep->add_option("--lambda-min", sweep_opts.lambda_min)->required();
  sweep->add_option("--lambda-max", sweep_opts.lambda_max)->required();
  sweep->add_option("--step", sweep_opts.step, "grid step")->capture_default_str();
  sweep->add_option("--seed", sweep_opts.minimize.seed)->capture_default_str();
  sweep->add_option("--restarts", sweep_opts.minimize.restarts)->capture_default_str();
  sweep->add_option("--jobs", sweep_opts.jobs, "worker threads")->capture_default_str();
  sweep->add_flag("--no-refine", no_refine, "skip refinement near transitions");
  sweep->add_option("--out", sweep_out, "CSV path, '-' for stdout");

  std::string fit_in, fit_which = "m", fit_jsonl;
  dqm::CriticalFitOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "locate lambda_c and fit beta from a sweep CSV");
  fit->add_option("csv", fit_in, "sweep CSV")->required();
  fit->add_option("--which", fit_which, "m|ms")->capture_default_str();
  fit->add_option("--threshold", fit_opts.threshold)->capture_default_str();
  fit->add_option("--window-lo", fit_opts.window_lo, "min |lambda - lambda_c|")->capture_default_str();
  fit->add_option("--window-hi", fit_opts.window_hi, "max |lambda - lambda_c|")->capture_default_str();
  fit->add_option("--out", fit_jsonl, "append the JSON record to this file");

  std::string problem;
  bool eff_validate = false;
  double eff_tmax = 50.0;
  auto* effective = app.add_subcommand("effective", "eliminate auxiliary spins from an operator file");
  effective->add_option("problem", problem)->required();
  effective->add_flag("--validate", eff_validate, "compare full and effective dynamics from the mixed state");
  effective->add_option("--t-max", eff_tmax)->capture_default_str();

  ModelFlags oracle_flags;
  int oracle_n = 2;
  std::string topology = "ring", oracle_out;
  auto* oracle = app.add_subcommand("oracle", "exact Liouvillian of a small cluster");
  oracle_flags.add(oracle, false, true);
  oracle->add_option("--n", oracle_n, "spins")->capture_default_str();
  oracle->add_option("--topology", topology, "chain|ring|complete")->capture_default_str();
  oracle->add_option("--out", oracle_out, "eigenvalue CSV");

  ModelFlags landau_flags;
  dqm::LandauOptions landau_opts;
  std::string direction = "in-plane", landau_out;
  auto* landau = app.add_subcommand("landau", "quartic fit of the norm in the order parameter");
  landau_flags.add(landau, false, true);
  landau->add_option("--direction", direction, "in-plane|staggered-z")->capture_default_str();
  landau->add_option("--phi-max", landau_opts.phi_max)->capture_default_str();
  landau->add_option("--samples", landau_opts.samples)->capture_default_str();
  landau->add_option("--out", landau_out, "CSV of (phi, norm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*sweep) {
      sweep_opts.refine = !no_refine;
      return run_sweep(sweep_flags, sweep_opts, sweep_out);
    }
    if (*fit) return run_fit(fit_in, fit_which, fit_opts, fit_jsonl);
    if (*effective) return run_effective(problem, eff_validate, eff_tmax);
    if (*oracle) return run_oracle(oracle_flags, oracle_n, topology, oracle_out);
    if (*landau) return run_landau(landau_flags, direction, landau_opts, landau_out);
  } catch (const dqm::FitError& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return kFitFailure;
  } catch (const std::length_error& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
