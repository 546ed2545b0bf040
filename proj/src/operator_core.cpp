#include "dqm/operator_core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

namespace dqm {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

void require_same_dim(const ComplexOperator& a, const ComplexOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

ComplexOperator::ComplexOperator() : m_(Matrix::Zero(1, 1)) {}

ComplexOperator::ComplexOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("ComplexOperator: matrix is not square");
  if (!is_power_of_two(static_cast<std::size_t>(m_.rows()))) {
    throw std::invalid_argument("ComplexOperator: dimension " + std::to_string(m_.rows()) +
                                " is not a power of two");
  }
  if (!m_.allFinite()) throw std::invalid_argument("ComplexOperator: non-finite entry");
}

ComplexOperator ComplexOperator::zero(std::size_t dim) {
  return ComplexOperator(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

ComplexOperator ComplexOperator::identity(std::size_t dim) {
  return ComplexOperator(
      Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

int ComplexOperator::spins() const { return std::countr_zero(dim()); }

ComplexOperator ComplexOperator::adjoint() const { return {m_.adjoint(), Unchecked{}}; }

double ComplexOperator::max_abs_diff(const ComplexOperator& other) const {
  require_same_dim(*this, other, "max_abs_diff");
  return (m_ - other.m_).cwiseAbs().maxCoeff();
}

bool ComplexOperator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ComplexOperator ComplexOperator::hermitian_part() const {
  return {(m_ + m_.adjoint()) * 0.5, Unchecked{}};
}

ComplexOperator& ComplexOperator::operator+=(const ComplexOperator& o) {
  require_same_dim(*this, o, "operator+");
  m_ += o.m_;
  return *this;
}

ComplexOperator& ComplexOperator::operator-=(const ComplexOperator& o) {
  require_same_dim(*this, o, "operator-");
  m_ -= o.m_;
  return *this;
}

ComplexOperator& ComplexOperator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b) {
  require_same_dim(a, b, "operator*");
  return {a.m_ * b.m_, ComplexOperator::Unchecked{}};
}

double BlochState::length() const { return std::sqrt(x * x + y * y + z * z); }

BlochState BlochState::clamped() const {
  const double r = length();
  if (r <= 1.0) return *this;
  return {x / r, y / r, z / r};
}

PauliAxis parse_pauli_axis(std::string_view token) {
  if (token.size() == 1) {
    switch (std::tolower(static_cast<unsigned char>(token[0]))) {
      case 'x': return PauliAxis::X;
      case 'y': return PauliAxis::Y;
      case 'z': return PauliAxis::Z;
      case '+': return PauliAxis::Plus;
      case '-': return PauliAxis::Minus;
      case 'i':
      case '1': return PauliAxis::Identity;
      default: break;
    }
  }
  throw std::invalid_argument("unknown Pauli axis '" + std::string(token) + "'");
}

ComplexOperator pauli(PauliAxis axis) {
  const Complex i{0.0, 1.0};
  Matrix m = Matrix::Zero(2, 2);
  switch (axis) {
    case PauliAxis::X: m << 0, 1, 1, 0; break;
    case PauliAxis::Y: m << 0, -i, i, 0; break;
    case PauliAxis::Z: m << 1, 0, 0, -1; break;
    case PauliAxis::Plus: m(0, 1) = 1; break;
    case PauliAxis::Minus: m(1, 0) = 1; break;
    case PauliAxis::Identity: m << 1, 0, 0, 1; break;
  }
  return ComplexOperator(std::move(m));
}

ComplexOperator bloch_to_density(const BlochState& s) {
  if (!(s.length() <= 1.0 + 1e-12)) {
    throw std::invalid_argument("bloch_to_density: Bloch vector length " +
                                std::to_string(s.length()) + " exceeds 1");
  }
  const Complex i{0.0, 1.0};
  Matrix m(2, 2);
  m << 0.5 * (1.0 + s.z), 0.5 * (s.x - i * s.y),
       0.5 * (s.x + i * s.y), 0.5 * (1.0 - s.z);
  return ComplexOperator(std::move(m));
}

ComplexOperator kron(const ComplexOperator& a, const ComplexOperator& b, std::size_t max_dim) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  if (da * db > max_dim) {
    throw std::length_error("kron: dimension " + std::to_string(da * db) + " exceeds limit " +
                            std::to_string(max_dim));
  }
  const auto ea = static_cast<Eigen::Index>(da);
  const auto eb = static_cast<Eigen::Index>(db);
  Matrix out(ea * eb, ea * eb);
  for (Eigen::Index r = 0; r < ea; ++r) {
    for (Eigen::Index c = 0; c < ea; ++c) {
      out.block(r * eb, c * eb, eb, eb) = a.matrix()(r, c) * b.matrix();
    }
  }
  return ComplexOperator(std::move(out));
}

ComplexOperator partial_trace(const ComplexOperator& op, std::span<const int> keep, int n) {
  if (n < 0 || op.dim() != (std::size_t{1} << n)) {
    throw std::invalid_argument("partial_trace: operator dimension does not match " +
                                std::to_string(n) + " spins");
  }
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw std::invalid_argument("partial_trace: duplicate site index");
  }
  for (int s : kept) {
    if (s < 0 || s >= n) throw std::out_of_range("partial_trace: invalid site index " + std::to_string(s));
  }

  std::size_t keep_mask = 0;
  for (int s : kept) keep_mask |= std::size_t{1} << (n - 1 - s);
  const std::size_t trace_mask = ((std::size_t{1} << n) - 1) & ~keep_mask;

  auto compress = [&](std::size_t full) {
    std::size_t out = 0;
    for (int s : kept) out = (out << 1) | ((full >> (n - 1 - s)) & 1U);
    return out;
  };

  const std::size_t dim_out = std::size_t{1} << kept.size();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim_out), static_cast<Eigen::Index>(dim_out));
  const std::size_t dim = op.dim();
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & trace_mask) != (c & trace_mask)) continue;
      out(static_cast<Eigen::Index>(compress(r)), static_cast<Eigen::Index>(compress(c))) += op(r, c);
    }
  }
  return ComplexOperator(std::move(out));
}

ComplexOperator embed(const ComplexOperator& op, std::span<const int> sites, int n, std::size_t max_dim) {
  const int k = op.spins();
  if (static_cast<int>(sites.size()) != k) {
    throw std::invalid_argument("embed: operator acts on " + std::to_string(k) + " spins but " +
                                std::to_string(sites.size()) + " sites given");
  }
  if (n < 0 || (std::size_t{1} << n) > max_dim) {
    throw std::length_error("embed: register of " + std::to_string(n) + " spins exceeds dimension limit");
  }
  std::size_t site_mask = 0;
  for (int s : sites) {
    if (s < 0 || s >= n) throw std::out_of_range("embed: invalid site index " + std::to_string(s));
    const std::size_t bit = std::size_t{1} << (n - 1 - s);
    if (site_mask & bit) throw std::invalid_argument("embed: duplicate site index");
    site_mask |= bit;
  }
  auto local_index = [&](std::size_t full) {
    std::size_t out = 0;
    for (int s : sites) out = (out << 1) | ((full >> (n - 1 - s)) & 1U);
    return out;
  };

  const std::size_t dim = std::size_t{1} << n;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & ~site_mask) != (c & ~site_mask)) continue;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = op(local_index(r), local_index(c));
    }
  }
  return ComplexOperator(std::move(out));
}

ComplexOperator dissipator(const ComplexOperator& c, const ComplexOperator& rho) {
  require_same_dim(c, rho, "dissipator");
  const Matrix& cm = c.matrix();
  const Matrix& r = rho.matrix();
  const Matrix cdc = cm.adjoint() * cm;
  return ComplexOperator(cm * r * cm.adjoint() - 0.5 * (cdc * r + r * cdc));
}

ComplexOperator commutator_generator(const ComplexOperator& h, const ComplexOperator& rho) {
  require_same_dim(h, rho, "commutator_generator");
  const Complex minus_i{0.0, -1.0};
  return ComplexOperator(minus_i * (h.matrix() * rho.matrix() - rho.matrix() * h.matrix()));
}

double trace_norm_hermitian(const ComplexOperator& op, double tol) {
  const Matrix& m = op.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw std::domain_error("trace_norm_hermitian: operator is not Hermitian (deviation " +
                            std::to_string(asym) + ")");
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

Vector bell_state(BellSign sign) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  v(1) = s;
  v(2) = sign == BellSign::Plus ? s : -s;
  return v;
}

Vector basis_ket(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("basis_ket: index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

ComplexOperator ket_bra(const Vector& ket, const Vector& bra) {
  if (ket.size() != bra.size()) throw std::invalid_argument("ket_bra: dimension mismatch");
  return ComplexOperator(ket * bra.adjoint());
}

}  // namespace dqm
