// Adiabatic elimination of decaying auxiliary spins.
//
// All operators of an EliminationProblem act on the full register: system
// spins first, auxiliary spins last (least significant). Auxiliary spins decay
// from up to down, so the ground manifold has every auxiliary spin down.

#pragma once

#include "dqm/operator_core.hpp"

#include <stdexcept>
#include <vector>

namespace dqm {

/// Raised when the non-Hermitian Hamiltonian is singular on the decaying
/// manifold, where second-order elimination is not defined.
class GaplessEliminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decay channel of one auxiliary spin. `unit` is the rate-free matrix.
struct DecayChannel {
  ComplexOperator unit;
  double rate = 0.0;

  /// sqrt(rate) * unit
  ComplexOperator folded() const;
};

struct EliminationProblem {
  int system_spins = 1;
  int aux_spins = 1;
  ComplexOperator h_ground;
  ComplexOperator h_excited;
  std::vector<ComplexOperator> v_plus;
  std::vector<ComplexOperator> v_minus;
  std::vector<DecayChannel> jumps;
  ComplexOperator excited_projector;

  int total_spins() const { return system_spins + aux_spins; }
  std::size_t channels() const { return jumps.size(); }

  /// Checks dimensions, Hermitian V pairs, projector idempotence and that
  /// h_excited stays inside the decaying manifold.
  void validate() const;
};

struct EffectiveModel {
  ComplexOperator h_eff;
  std::vector<ComplexOperator> c_eff;
};

/// H_e - (i/2) c^dagger c for channel k, restricted to the decaying manifold.
ComplexOperator nonhermitian_hamiltonian(const EliminationProblem& p, std::size_t k);

/// Inverse of h_tilde within range(projector), zero on its complement.
ComplexOperator invert_on_decaying_manifold(const ComplexOperator& h_tilde,
                                            const ComplexOperator& projector);

ComplexOperator effective_hamiltonian(const EliminationProblem& p);
std::vector<ComplexOperator> effective_jumps(const EliminationProblem& p);
EffectiveModel eliminate(const EliminationProblem& p);

/// Block of a full-register operator with every auxiliary spin down, i.e. the
/// operator with the auxiliary |d><d| factor stripped off.
ComplexOperator strip_auxiliary(const ComplexOperator& op, int system_spins, int aux_spins);

/// Projector onto states with at least one auxiliary spin up.
ComplexOperator auxiliary_excited_projector(int system_spins, int aux_spins);

struct ValidationReport {
  double max_trace_distance = 0.0;
  double t_max = 0.0;
  std::size_t steps = 0;
};

/// Integrates the full master equation and the effective one from the same
/// system state (auxiliaries down) with fixed-step RK4 and reports the largest
/// trace distance between the reduced and the effective system state.
ValidationReport validate_elimination(const EliminationProblem& p, const EffectiveModel& eff,
                                      const ComplexOperator& initial_system_state, double t_max,
                                      double tol = 1e-3, std::size_t max_steps = 2'000'000);

/// System spin 0 coupled to one auxiliary: H = E0 |-><+| sigma^+ + h.c.,
/// decay sqrt(gamma) sigma^-. Ground Hamiltonian and H_e vanish.
EliminationProblem single_spin_pump_problem(double e0, double gamma);

/// Two system spins and one auxiliary: H = E0 |psi+><psi-| sigma^+ + h.c.
EliminationProblem bell_pump_problem(double e0, double gamma);

}  // namespace dqm
