// Variational steady states of dissipative spin lattices.
//
// The functional is the trace norm of the two-site reduced time derivative
// evaluated on a product state. For a homogeneous product state every bond
// contributes the same amount, so one bond norm is minimized. The reduced
// derivative splits into a local part (one-site terms on either site), an
// interaction part (two-site terms on the bond itself) and a mean-field part
// from the 2(z-1) bonds that connect the pair to its other neighbours.

#pragma once

#include "dqm/model.hpp"
#include "dqm/operator_core.hpp"
#include "dqm/simplex.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dqm {

/// Uniform: every site carries `a`. Bipartite: sublattice A carries `a`,
/// sublattice B carries `b`.
struct ProductAnsatz {
  AnsatzKind kind = AnsatzKind::Uniform;
  BlochState a;
  BlochState b;

  static ProductAnsatz uniform(const BlochState& s) { return {AnsatzKind::Uniform, s, s}; }
  static ProductAnsatz bipartite(const BlochState& a, const BlochState& b) {
    return {AnsatzKind::Bipartite, a, b};
  }
};

struct NormBreakdown {
  ComplexOperator d_loc;
  ComplexOperator d_int;
  ComplexOperator d_mf;
  double total_norm = 0.0;

  ComplexOperator total() const { return d_loc + d_int + d_mf; }
};

enum class PairSlot { I = 0, J = 1 };

/// Mean-field generator of a bond Hamiltonian h acting on (slot, neighbour):
/// returns G such that tr_k(-i[h, rho_pair (x) rho_k]) = -i[G, rho_pair].
/// G = sum_a tr(B_a rho_k) A_a on the slot, from the Pauli-basis expansion
/// h = sum_a A_a (x) B_a.
ComplexOperator mean_field_hamiltonian_term(const ComplexOperator& h_bond, PairSlot slot,
                                            const BlochState& neighbor);

/// tr_k D(c_{slot,k})(pair_state (x) rho_k), built on the three-site register
/// (i, j, k) and traced over k.
ComplexOperator mean_field_jump_term(const ComplexOperator& c_bond, PairSlot slot, const BlochState& neighbor,
                                     const ComplexOperator& pair_state);

/// Precomputed bond generator for one model. Evaluating the functional many
/// times (inside a minimizer) goes through this object.
class BondFunctional {
 public:
  explicit BondFunctional(const DissipativeModel& model);

  NormBreakdown breakdown(const ProductAnsatz& ansatz) const;
  double norm(const ProductAnsatz& ansatz) const;

  const DissipativeModel& model() const { return model_; }

 private:
  using Mat2 = Eigen::Matrix2cd;
  using Mat4 = Eigen::Matrix4cd;

  // Sum over jumps of tr_k D(c_{s,k})(rho_s (x) rho_k), a one-site operator on s.
  Mat2 traced_pair_dissipator(const Mat2& rho_s, const Mat2& rho_k) const;
  // Sum_a tr(B_a rho_k) A_a for the two-site Hamiltonian.
  Mat2 mean_field_field(const Mat2& rho_k) const;
  void parts(const ProductAnsatz& ansatz, Mat4& loc, Mat4& inter, Mat4& mf) const;

  DissipativeModel model_;
  std::vector<Mat4> pair_jumps_;
  Mat4 pair_cdc_ = Mat4::Zero();
  std::vector<Mat2> site_jumps_;
  Mat2 site_cdc_ = Mat2::Zero();
  Mat2 h_site_ = Mat2::Zero();
  Mat4 h_pair_ = Mat4::Zero();
  // Pauli coefficients h_ab of the summed two-site Hamiltonian.
  Eigen::Matrix4cd h_pauli_ = Eigen::Matrix4cd::Zero();
};

NormBreakdown reduced_derivative(const DissipativeModel& model, const ProductAnsatz& ansatz);

struct MinimizeOptions {
  int restarts = 8;
  double tol = 1e-9;
  std::uint64_t seed = 12345;
  /// Fix alpha_y = 0 on sublattice A, removing the U(1) flat direction.
  bool gauge_fix = true;
  int max_iterations = 5000;
};

struct MinimizeResult {
  ProductAnsatz ansatz;
  double residual_norm = 0.0;
  bool converged = false;
  int restarts_used = 0;
};

/// Best product state over a fixed set of simplex restarts
/// (+x, -x, +z, -z, Neel, mixed, origin, random).
MinimizeResult minimize_norm(const DissipativeModel& model, AnsatzKind kind, const MinimizeOptions& options = {});

struct OrderParameters {
  double m = 0.0;
  double m_s = 0.0;
};

/// m: in-plane magnetization averaged over sublattices; m_s: |a_z - b_z| / 2.
OrderParameters order_parameters(const ProductAnsatz& a);

enum class LandauDirection { InPlane, StaggeredZ };

LandauDirection parse_landau_direction(const std::string& s);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LandauFit {
  double u0 = 0.0;
  double u2 = 0.0;
  double u4 = 0.0;
  /// Root-mean-square deviation of the samples from the quartic.
  double residual = 0.0;
  std::vector<std::pair<double, double>> phi_grid;
};

struct LandauOptions {
  double phi_max = 0.01;
  int samples = 11;
  std::uint64_t seed = 12345;
};

/// Samples the norm at phi in [0, phi_max] with the remaining parameters at
/// their conditional minimum, then least-squares fits u0 + u2 phi^2 + u4 phi^4.
LandauFit landau_expansion(const DissipativeModel& model, LandauDirection direction,
                           const LandauOptions& options = {});

struct SweepRecord {
  double lambda = 0.0;
  BlochState alpha_a;
  BlochState alpha_b;
  double m = 0.0;
  double m_s = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
  int restarts_used = 0;
};

enum class OrderParameter { M, Ms };

OrderParameter parse_order_parameter(const std::string& s);

class NoTransitionError : public FitError {
 public:
  using FitError::FitError;
};

struct CriticalFitOptions {
  double threshold = 1e-4;
  /// Fit window in |lambda - lambda_c|.
  double window_lo = 0.002;
  double window_hi = 0.05;
  std::size_t min_points = 8;
};

struct CriticalFit {
  double lambda_c = 0.0;
  double beta = 0.0;
  /// Window in lambda actually used for the regression.
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  /// Amplitude A in order ~ A |lambda - lambda_c|^beta.
  double amplitude = 0.0;
};

/// Locates lambda_c as the midpoint of the tightest bracket where the order
/// parameter crosses `threshold`, then regresses log(order) on
/// log|lambda - lambda_c| over the ordered side. Unconverged records are ignored.
CriticalFit fit_critical(const std::vector<SweepRecord>& records, OrderParameter which,
                         const CriticalFitOptions& options = {});

/// Bracket [ordered, disordered] in lambda around the threshold crossing.
/// Throws NoTransitionError when the order parameter never crosses.
std::pair<double, double> transition_bracket(const std::vector<SweepRecord>& records, OrderParameter which,
                                             double threshold = 1e-4);

}  // namespace dqm
