#include "dqm/effective_ops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <numeric>
#include <string>

namespace dqm {

namespace {

constexpr double kSingularTol = 1e-12;

std::size_t full_dim(const EliminationProblem& p) { return std::size_t{1} << p.total_spins(); }

// d rho/dt = -i[H, rho] + sum_k D(c_k) rho
Matrix lindblad_rhs(const Matrix& h, const std::vector<Matrix>& jumps,
                    const std::vector<Matrix>& jumps_dd, const Matrix& rho) {
  const Complex minus_i{0.0, -1.0};
  Matrix out = minus_i * (h * rho - rho * h);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const Matrix& c = jumps[k];
    out += c * rho * c.adjoint() - 0.5 * (jumps_dd[k] * rho + rho * jumps_dd[k]);
  }
  return out;
}

struct LindbladSystem {
  Matrix h;
  std::vector<Matrix> c;
  std::vector<Matrix> cdc;

  LindbladSystem(Matrix h_, const std::vector<ComplexOperator>& jumps) : h(std::move(h_)) {
    for (const auto& j : jumps) {
      c.push_back(j.matrix());
      cdc.push_back(j.matrix().adjoint() * j.matrix());
    }
  }

  // Crude bound on the generator norm, used to pick the RK4 step.
  double rate_bound() const {
    double b = 2.0 * h.cwiseAbs().rowwise().sum().maxCoeff();
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double cn = c[k].cwiseAbs().rowwise().sum().maxCoeff();
      b += cn * cn + cdc[k].cwiseAbs().rowwise().sum().maxCoeff();
    }
    return b;
  }

  Matrix rhs(const Matrix& rho) const { return lindblad_rhs(h, c, cdc, rho); }

  void rk4_step(Matrix& rho, double dt) const {
    const Matrix k1 = rhs(rho);
    const Matrix k2 = rhs(rho + 0.5 * dt * k1);
    const Matrix k3 = rhs(rho + 0.5 * dt * k2);
    const Matrix k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

}  // namespace

ComplexOperator DecayChannel::folded() const { return std::sqrt(rate) * unit; }

void EliminationProblem::validate() const {
  if (system_spins < 1 || aux_spins < 1) {
    throw std::invalid_argument("EliminationProblem: need at least one system and one auxiliary spin");
  }
  const std::size_t dim = full_dim(*this);
  auto check_dim = [&](const ComplexOperator& op, const std::string& what) {
    if (op.dim() != dim) {
      throw std::invalid_argument("EliminationProblem: " + what + " has dimension " +
                                  std::to_string(op.dim()) + ", expected " + std::to_string(dim));
    }
  };
  check_dim(h_ground, "H_g");
  check_dim(h_excited, "H_e");
  check_dim(excited_projector, "excited projector");
  if (v_plus.size() != jumps.size() || v_minus.size() != jumps.size()) {
    throw std::invalid_argument("EliminationProblem: V+, V- and jump lists must have equal length");
  }
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    check_dim(v_plus[k], "V+[" + std::to_string(k) + "]");
    check_dim(v_minus[k], "V-[" + std::to_string(k) + "]");
    check_dim(jumps[k].unit, "jump[" + std::to_string(k) + "]");
    if (!(jumps[k].rate > 0.0) || !std::isfinite(jumps[k].rate)) {
      throw std::invalid_argument("EliminationProblem: decay rates must be positive");
    }
    if (v_minus[k].max_abs_diff(v_plus[k].adjoint()) > kHermitianTol) {
      throw std::invalid_argument("EliminationProblem: V-[" + std::to_string(k) +
                                  "] is not the adjoint of V+[" + std::to_string(k) + "]");
    }
  }
  if (!h_ground.is_hermitian() || !h_excited.is_hermitian()) {
    throw std::invalid_argument("EliminationProblem: H_g and H_e must be Hermitian");
  }
  const auto& P = excited_projector;
  if (!P.is_hermitian() || (P * P).max_abs_diff(P) > kHermitianTol) {
    throw std::invalid_argument("EliminationProblem: excited projector must be a Hermitian idempotent");
  }
  if ((h_excited * P).max_abs_diff(P * h_excited) > kHermitianTol) {
    throw std::invalid_argument("EliminationProblem: H_e does not commute with the excited projector");
  }
}

ComplexOperator nonhermitian_hamiltonian(const EliminationProblem& p, std::size_t k) {
  if (k >= p.jumps.size()) throw std::out_of_range("nonhermitian_hamiltonian: channel index out of range");
  const ComplexOperator c = p.jumps[k].folded();
  const ComplexOperator& P = p.excited_projector;
  const ComplexOperator h = p.h_excited - Complex(0.0, 0.5) * (c.adjoint() * c);
  return P * h * P;
}

ComplexOperator invert_on_decaying_manifold(const ComplexOperator& h_tilde, const ComplexOperator& projector) {
  if (h_tilde.dim() != projector.dim()) {
    throw std::invalid_argument("invert_on_decaying_manifold: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> proj(projector.hermitian_part().matrix());
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < proj.eigenvalues().size(); ++i) {
    if (proj.eigenvalues()(i) > 0.5) cols.push_back(i);
  }
  const auto dim = static_cast<Eigen::Index>(h_tilde.dim());
  if (cols.empty()) return ComplexOperator::zero(h_tilde.dim());

  Matrix Q(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) Q.col(static_cast<Eigen::Index>(j)) = proj.eigenvectors().col(cols[j]);

  const Matrix block = Q.adjoint() * h_tilde.matrix() * Q;
  Eigen::ComplexEigenSolver<Matrix> eig(block, false);
  const double smallest = eig.eigenvalues().cwiseAbs().minCoeff();
  if (!(smallest > kSingularTol)) {
    throw GaplessEliminationError("gapless elimination: non-Hermitian Hamiltonian has eigenvalue of modulus " +
                                  std::to_string(smallest) + " on the decaying manifold");
  }
  return ComplexOperator(Q * block.partialPivLu().inverse() * Q.adjoint());
}

ComplexOperator effective_hamiltonian(const EliminationProblem& p) {
  p.validate();
  ComplexOperator h = p.h_ground;
  for (std::size_t k = 0; k < p.channels(); ++k) {
    const ComplexOperator inv = invert_on_decaying_manifold(nonhermitian_hamiltonian(p, k), p.excited_projector);
    h -= Complex(0.5) * (p.v_minus[k] * (inv + inv.adjoint()) * p.v_plus[k]);
  }
  return h;
}

std::vector<ComplexOperator> effective_jumps(const EliminationProblem& p) {
  p.validate();
  std::vector<ComplexOperator> out;
  out.reserve(p.channels());
  for (std::size_t k = 0; k < p.channels(); ++k) {
    const ComplexOperator inv = invert_on_decaying_manifold(nonhermitian_hamiltonian(p, k), p.excited_projector);
    out.push_back(p.jumps[k].folded() * inv * p.v_plus[k]);
  }
  return out;
}

EffectiveModel eliminate(const EliminationProblem& p) {
  return {effective_hamiltonian(p), effective_jumps(p)};
}

ComplexOperator strip_auxiliary(const ComplexOperator& op, int system_spins, int aux_spins) {
  if (op.dim() != (std::size_t{1} << (system_spins + aux_spins))) {
    throw std::invalid_argument("strip_auxiliary: operator dimension does not match register");
  }
  const auto sys_dim = Eigen::Index{1} << system_spins;
  const auto aux_dim = Eigen::Index{1} << aux_spins;
  const Eigen::Index all_down = aux_dim - 1;
  Matrix out(sys_dim, sys_dim);
  for (Eigen::Index r = 0; r < sys_dim; ++r) {
    for (Eigen::Index c = 0; c < sys_dim; ++c) {
      out(r, c) = op.matrix()(r * aux_dim + all_down, c * aux_dim + all_down);
    }
  }
  return ComplexOperator(std::move(out));
}

ComplexOperator auxiliary_excited_projector(int system_spins, int aux_spins) {
  const auto aux_dim = Eigen::Index{1} << aux_spins;
  Matrix aux = Matrix::Identity(aux_dim, aux_dim);
  aux(aux_dim - 1, aux_dim - 1) = 0.0;
  return kron(ComplexOperator::identity(std::size_t{1} << system_spins), ComplexOperator(std::move(aux)));
}

ValidationReport validate_elimination(const EliminationProblem& p, const EffectiveModel& eff,
                                      const ComplexOperator& initial_system_state, double t_max,
                                      double tol, std::size_t max_steps) {
  p.validate();
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("validate_elimination: bad t_max");
  if (!(tol > 0.0)) throw std::invalid_argument("validate_elimination: tol must be positive");
  const std::size_t sys_dim = std::size_t{1} << p.system_spins;
  if (initial_system_state.dim() != sys_dim) {
    throw std::invalid_argument("validate_elimination: initial state dimension mismatch");
  }

  Matrix h_full = p.h_ground.matrix() + p.h_excited.matrix();
  std::vector<ComplexOperator> c_full;
  for (std::size_t k = 0; k < p.channels(); ++k) {
    h_full += p.v_plus[k].matrix() + p.v_minus[k].matrix();
    c_full.push_back(p.jumps[k].folded());
  }
  const LindbladSystem full(h_full, c_full);

  std::vector<ComplexOperator> c_sys;
  for (const auto& c : eff.c_eff) c_sys.push_back(strip_auxiliary(c, p.system_spins, p.aux_spins));
  const LindbladSystem reduced(strip_auxiliary(eff.h_eff, p.system_spins, p.aux_spins).matrix(), c_sys);

  const double bound = std::max(full.rate_bound(), reduced.rate_bound());
  const double max_dt_rate = std::min(0.5, std::pow(tol, 0.25));
  std::size_t steps = 1;
  if (t_max > 0.0 && bound > 0.0) {
    const double needed = std::ceil(t_max * bound / max_dt_rate);
    if (needed > static_cast<double>(max_steps)) {
      throw IntegratorError("validate_elimination: " + std::to_string(needed) +
                            " RK4 steps required, limit is " + std::to_string(max_steps));
    }
    steps = std::max<std::size_t>(1, static_cast<std::size_t>(needed));
  }
  const double dt = t_max / static_cast<double>(steps);

  const auto aux_dim = std::size_t{1} << p.aux_spins;
  Matrix aux_ground = Matrix::Zero(static_cast<Eigen::Index>(aux_dim), static_cast<Eigen::Index>(aux_dim));
  aux_ground(static_cast<Eigen::Index>(aux_dim - 1), static_cast<Eigen::Index>(aux_dim - 1)) = 1.0;
  Matrix rho_full = kron(initial_system_state, ComplexOperator(aux_ground)).matrix();
  Matrix rho_eff = initial_system_state.matrix();

  std::vector<int> keep(static_cast<std::size_t>(p.system_spins));
  std::iota(keep.begin(), keep.end(), 0);

  auto distance = [&]() {
    const ComplexOperator reduced_full = partial_trace(ComplexOperator(rho_full), keep, p.total_spins());
    const ComplexOperator diff = (reduced_full - ComplexOperator(rho_eff)).hermitian_part();
    return 0.5 * trace_norm_hermitian(diff);
  };

  ValidationReport report;
  report.t_max = t_max;
  report.steps = steps;
  report.max_trace_distance = distance();
  if (t_max == 0.0) return report;
  for (std::size_t s = 0; s < steps; ++s) {
    full.rk4_step(rho_full, dt);
    reduced.rk4_step(rho_eff, dt);
    if (!rho_full.allFinite() || !rho_eff.allFinite()) {
      throw IntegratorError("validate_elimination: state became non-finite at step " + std::to_string(s));
    }
    report.max_trace_distance = std::max(report.max_trace_distance, distance());
  }
  return report;
}

EliminationProblem single_spin_pump_problem(double e0, double gamma) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector plus(2), minus(2);
  plus << s, s;
  minus << s, -s;
  EliminationProblem p;
  p.system_spins = 1;
  p.aux_spins = 1;
  p.h_ground = ComplexOperator::zero(4);
  p.h_excited = ComplexOperator::zero(4);
  p.v_plus = {Complex(e0) * kron(ket_bra(minus, plus), pauli(PauliAxis::Plus))};
  p.v_minus = {p.v_plus[0].adjoint()};
  p.jumps = {DecayChannel{kron(ComplexOperator::identity(2), pauli(PauliAxis::Minus)), gamma}};
  p.excited_projector = auxiliary_excited_projector(1, 1);
  return p;
}

EliminationProblem bell_pump_problem(double e0, double gamma) {
  EliminationProblem p;
  p.system_spins = 2;
  p.aux_spins = 1;
  p.h_ground = ComplexOperator::zero(8);
  p.h_excited = ComplexOperator::zero(8);
  const ComplexOperator pump = ket_bra(bell_state(BellSign::Plus), bell_state(BellSign::Minus));
  p.v_plus = {Complex(e0) * kron(pump, pauli(PauliAxis::Plus))};
  p.v_minus = {p.v_plus[0].adjoint()};
  p.jumps = {DecayChannel{kron(ComplexOperator::identity(4), pauli(PauliAxis::Minus)), gamma}};
  p.excited_projector = auxiliary_excited_projector(2, 1);
  return p;
}

}  // namespace dqm
