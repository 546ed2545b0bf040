// Exact Lindblad generator of a small spin cluster.
//
// Vectorization is column stacking: vec(A X B) = (B^T (x) A) vec(X), so
//   L = -i(1 (x) H - H^T (x) 1) + sum_c [conj(c) (x) c - (1 (x) c^dag c + (c^dag c)^T (x) 1)/2].

#pragma once

#include "dqm/model.hpp"
#include "dqm/operator_core.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dqm {

inline constexpr int kMaxOracleSpins = 6;

class ResourceLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class Topology { Chain, Ring, Complete };

Topology parse_topology(const std::string& s);

using Bond = std::pair<int, int>;

/// Bonds of an n-site cluster. A ring of two sites has a single bond.
std::vector<Bond> bonds_for(Topology topology, int n);

struct Liouvillian {
  int n = 0;
  Matrix matrix;
  std::vector<Bond> bonds;

  /// L applied to an n-spin density matrix.
  ComplexOperator apply(const ComplexOperator& rho) const;
};

Liouvillian build_liouvillian(const DissipativeModel& model, int n, Topology topology);
Liouvillian build_liouvillian(const DissipativeModel& model, int n, const std::vector<Bond>& bonds);

struct SteadyStateReport {
  int null_dimension = 0;
  /// Hermitian, unit-trace basis of the null space.
  std::vector<ComplexOperator> steady_states;
  double spectral_gap = 0.0;
  std::vector<Complex> eigenvalues;
};

SteadyStateReport steady_states(const Liouvillian& L, double tol = 1e-9);

/// Generator applied directly to an n-spin state, without building the superoperator.
ComplexOperator apply_lindbladian(const DissipativeModel& model, const std::vector<Bond>& bonds, int n,
                                  const ComplexOperator& rho);

/// Trace norm of d rho/dt for the full cluster state.
double exact_norm(const DissipativeModel& model, const ComplexOperator& full_state, int n, Topology topology);

/// rho_0 (x) rho_1 (x) ... for the given Bloch vectors.
ComplexOperator product_state(const std::vector<BlochState>& sites);

/// Vectorized (column-stacked) form of an operator and its inverse.
Vector vectorize(const ComplexOperator& op);
ComplexOperator devectorize(const Vector& v);

}  // namespace dqm
