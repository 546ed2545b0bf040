// Dense complex operator algebra on few-spin Hilbert spaces.
//
// Basis convention: a single spin uses {up, down} = indices {0, 1}, with
// sigma_z |up> = +|up>. Multi-spin operators are Kronecker products where the
// leftmost factor (site 0) is the most significant bit, so two-spin states
// are ordered {uu, ud, du, dd}.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>

namespace dqm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultMaxDim = 4096;
inline constexpr double kHermitianTol = 1e-10;

/// Square complex matrix whose dimension is a power of two, i.e. an operator
/// on n spin-1/2 sites. All entries are finite.
class ComplexOperator {
 public:
  /// 1x1 zero operator (zero spins).
  ComplexOperator();
  explicit ComplexOperator(Matrix m);

  static ComplexOperator zero(std::size_t dim);
  static ComplexOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  int spins() const;
  const Matrix& matrix() const { return m_; }

  Complex operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  ComplexOperator adjoint() const;
  Complex trace() const { return m_.trace(); }

  /// Largest entrywise modulus of (this - other).
  double max_abs_diff(const ComplexOperator& other) const;
  bool is_hermitian(double tol = kHermitianTol) const;
  /// (A + A^dagger) / 2
  ComplexOperator hermitian_part() const;

  ComplexOperator& operator+=(const ComplexOperator& o);
  ComplexOperator& operator-=(const ComplexOperator& o);
  ComplexOperator& operator*=(Complex s);

  friend ComplexOperator operator+(ComplexOperator a, const ComplexOperator& b) { return a += b; }
  friend ComplexOperator operator-(ComplexOperator a, const ComplexOperator& b) { return a -= b; }
  friend ComplexOperator operator*(ComplexOperator a, Complex s) { return a *= s; }
  friend ComplexOperator operator*(Complex s, ComplexOperator a) { return a *= s; }
  friend ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b);

 private:
  struct Unchecked {};
  ComplexOperator(Matrix m, Unchecked) : m_(std::move(m)) {}

  Matrix m_;
};

/// Bloch vector of a single spin-1/2: rho = (1 + a.sigma)/2.
struct BlochState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double length() const;
  /// Radial projection onto the unit ball.
  BlochState clamped() const;
  std::array<double, 3> as_array() const { return {x, y, z}; }
};

enum class PauliAxis { X, Y, Z, Plus, Minus, Identity };

/// Parses one of "x", "y", "z", "+", "-", "i"/"1" (case-insensitive letters).
PauliAxis parse_pauli_axis(std::string_view token);

/// sigma^- = (sigma_x - i sigma_y)/2 = |down><up|, sigma^+ its adjoint.
ComplexOperator pauli(PauliAxis axis);

ComplexOperator bloch_to_density(const BlochState& s);

ComplexOperator kron(const ComplexOperator& a, const ComplexOperator& b,
                     std::size_t max_dim = kDefaultMaxDim);

/// Reduces an n-spin operator to the sites in `keep`. Kept sites appear in
/// increasing site order in the result.
ComplexOperator partial_trace(const ComplexOperator& op, std::span<const int> keep, int n);

/// Places a k-spin operator on `sites` of an n-spin register; the first entry
/// of `sites` receives the most significant factor of `op`.
ComplexOperator embed(const ComplexOperator& op, std::span<const int> sites, int n,
                      std::size_t max_dim = kDefaultMaxDim);

/// c rho c^dagger - {c^dagger c, rho}/2
ComplexOperator dissipator(const ComplexOperator& c, const ComplexOperator& rho);

/// -i [h, rho]
ComplexOperator commutator_generator(const ComplexOperator& h, const ComplexOperator& rho);

/// Sum of |eigenvalues| after symmetrizing. Throws std::domain_error when the
/// input deviates from Hermitian by more than `tol` (relative to its scale).
double trace_norm_hermitian(const ComplexOperator& op, double tol = kHermitianTol);

enum class BellSign { Plus, Minus };

/// (|ud> +- |du>)/sqrt(2)
Vector bell_state(BellSign sign);

/// Computational basis ket |index> of the given dimension.
Vector basis_ket(std::size_t dim, std::size_t index);

/// |ket><bra|
ComplexOperator ket_bra(const Vector& ket, const Vector& bra);

}  // namespace dqm
