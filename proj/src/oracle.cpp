#include "dqm/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

namespace dqm {

namespace {

struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

std::vector<Entry> nonzeros(const Matrix& m) {
  std::vector<Entry> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != Complex(0.0)) out.push_back({r, c, m(r, c)});
  return out;
}

std::vector<Entry> identity_entries(Eigen::Index dim) {
  std::vector<Entry> out;
  for (Eigen::Index i = 0; i < dim; ++i) out.push_back({i, i, 1.0});
  return out;
}

// L += alpha * (A (x) B) using the nonzero pattern of both factors.
void add_kron(Matrix& L, Complex alpha, const std::vector<Entry>& a, const std::vector<Entry>& b, Eigen::Index dim) {
  for (const auto& ea : a)
    for (const auto& eb : b) L(ea.row * dim + eb.row, ea.col * dim + eb.col) += alpha * ea.value * eb.value;
}

struct Term {
  ComplexOperator op;
  bool is_jump;
};

// All Hamiltonian and jump terms of the cluster, embedded on n spins.
std::vector<Term> cluster_terms(const DissipativeModel& model, const std::vector<Bond>& bonds, int n) {
  std::vector<Term> out;
  for (int s = 0; s < n; ++s) {
    const std::array<int, 1> site = {s};
    for (const auto& h : model.hamiltonian_terms)
      if (h.arity == 1) out.push_back({embed(h.matrix, site, n), false});
    for (const auto& j : model.jump_terms)
      if (j.arity == 1) out.push_back({embed(j.matrix, site, n), true});
  }
  for (const auto& [i, j] : bonds) {
    const std::array<int, 2> sites = {i, j};
    for (const auto& h : model.hamiltonian_terms)
      if (h.arity == 2) out.push_back({embed(h.matrix, sites, n), false});
    for (const auto& c : model.jump_terms)
      if (c.arity == 2) out.push_back({embed(c.matrix, sites, n), true});
  }
  return out;
}

void check_size(int n) {
  if (n < 1) throw std::invalid_argument("cluster needs at least one spin");
  if (n > kMaxOracleSpins) {
    throw ResourceLimitError("cluster of " + std::to_string(n) + " spins exceeds the limit of " +
                             std::to_string(kMaxOracleSpins));
  }
}

void check_bonds(const std::vector<Bond>& bonds, int n) {
  for (const auto& [i, j] : bonds) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::invalid_argument("invalid bond (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
}

// Real inner product Re tr(A^dagger B) on Hermitian matrices.
double real_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

}  // namespace

Topology parse_topology(const std::string& s) {
  std::string v = s;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "chain") return Topology::Chain;
  if (v == "ring") return Topology::Ring;
  if (v == "complete") return Topology::Complete;
  throw std::invalid_argument("unknown topology '" + s + "' (expected chain|ring|complete)");
}

std::vector<Bond> bonds_for(Topology topology, int n) {
  std::vector<Bond> bonds;
  switch (topology) {
    case Topology::Chain:
      for (int i = 0; i + 1 < n; ++i) bonds.emplace_back(i, i + 1);
      break;
    case Topology::Ring:
      for (int i = 0; i + 1 < n; ++i) bonds.emplace_back(i, i + 1);
      if (n > 2) bonds.emplace_back(n - 1, 0);
      break;
    case Topology::Complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) bonds.emplace_back(i, j);
      break;
  }
  return bonds;
}

ComplexOperator Liouvillian::apply(const ComplexOperator& rho) const {
  if (rho.dim() != (std::size_t{1} << n)) throw std::invalid_argument("Liouvillian::apply: dimension mismatch");
  return devectorize(matrix * vectorize(rho));
}

Liouvillian build_liouvillian(const DissipativeModel& model, int n, Topology topology) {
  check_size(n);
  return build_liouvillian(model, n, bonds_for(topology, n));
}

Liouvillian build_liouvillian(const DissipativeModel& model, int n, const std::vector<Bond>& bonds) {
  check_size(n);
  check_bonds(bonds, n);
  const auto dim = Eigen::Index{1} << n;
  Liouvillian L;
  L.n = n;
  L.bonds = bonds;
  L.matrix = Matrix::Zero(dim * dim, dim * dim);
  const auto id = identity_entries(dim);
  const Complex minus_i{0.0, -1.0};
  for (const auto& term : cluster_terms(model, bonds, n)) {
    const Matrix& m = term.op.matrix();
    if (!term.is_jump) {
      add_kron(L.matrix, minus_i, id, nonzeros(m), dim);
      add_kron(L.matrix, -minus_i, nonzeros(m.transpose()), id, dim);
      continue;
    }
    const Matrix cdc = m.adjoint() * m;
    const auto c_entries = nonzeros(m);
    add_kron(L.matrix, 1.0, nonzeros(m.conjugate()), c_entries, dim);
    add_kron(L.matrix, -0.5, id, nonzeros(cdc), dim);
    add_kron(L.matrix, -0.5, nonzeros(cdc.transpose()), id, dim);
  }
  return L;
}

SteadyStateReport steady_states(const Liouvillian& L, double tol) {
  SteadyStateReport report;
  const auto dim = Eigen::Index{1} << L.n;

  Eigen::ComplexEigenSolver<Matrix> eig(L.matrix, false);
  if (eig.info() != Eigen::Success) throw std::runtime_error("steady_states: eigensolver failed");
  const auto& ev = eig.eigenvalues();
  report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  double slowest = -std::numeric_limits<double>::infinity();
  for (const auto& e : report.eigenvalues)
    if (std::abs(e) >= tol) slowest = std::max(slowest, e.real());
  report.spectral_gap = std::isfinite(slowest) ? -slowest : 0.0;

  Eigen::BDCSVD<Matrix> svd(L.matrix, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Matrix> hermitian;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) >= tol) continue;
    const Matrix x = devectorize(svd.matrixV().col(k)).matrix();
    hermitian.push_back(0.5 * (x + x.adjoint()));
    hermitian.push_back(Complex(0.0, -0.5) * (x - x.adjoint()));
  }
  // The null space is closed under adjoint, so its Hermitian parts span it as
  // a real vector space of the same dimension.
  std::vector<Matrix> basis;
  for (auto& h : hermitian) {
    for (const auto& b : basis) h -= real_inner(b, h) * b;
    const double nrm = std::sqrt(std::max(0.0, real_inner(h, h)));
    if (nrm > 1e-6) basis.push_back(h / nrm);
  }
  report.null_dimension = static_cast<int>(basis.size());
  if (basis.empty()) return report;

  std::size_t ref = 0;
  for (std::size_t k = 1; k < basis.size(); ++k)
    if (std::abs(basis[k].trace()) > std::abs(basis[ref].trace())) ref = k;
  const Complex ref_trace = basis[ref].trace();
  if (std::abs(ref_trace) < 1e-10) return report;  // traceless null space: no states
  const Matrix reference = basis[ref] / ref_trace.real();
  report.steady_states.push_back(ComplexOperator(reference));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (k == ref) continue;
    const Complex tr = basis[k].trace();
    Matrix rho = std::abs(tr) > 1e-8 ? Matrix(basis[k] / tr.real()) : Matrix(reference + basis[k] / static_cast<double>(dim));
    report.steady_states.push_back(ComplexOperator(0.5 * (rho + rho.adjoint())));
  }
  return report;
}

ComplexOperator apply_lindbladian(const DissipativeModel& model, const std::vector<Bond>& bonds, int n,
                                  const ComplexOperator& rho) {
  check_size(n);
  check_bonds(bonds, n);
  if (rho.dim() != (std::size_t{1} << n)) throw std::invalid_argument("apply_lindbladian: dimension mismatch");
  ComplexOperator out = ComplexOperator::zero(rho.dim());
  for (const auto& term : cluster_terms(model, bonds, n)) {
    out += term.is_jump ? dissipator(term.op, rho) : commutator_generator(term.op, rho);
  }
  return out;
}

double exact_norm(const DissipativeModel& model, const ComplexOperator& full_state, int n, Topology topology) {
  check_size(n);
  const ComplexOperator d = apply_lindbladian(model, bonds_for(topology, n), n, full_state);
  return trace_norm_hermitian(d.hermitian_part());
}

ComplexOperator product_state(const std::vector<BlochState>& sites) {
  if (sites.empty()) throw std::invalid_argument("product_state: no sites");
  ComplexOperator out = bloch_to_density(sites.front());
  for (std::size_t k = 1; k < sites.size(); ++k) out = kron(out, bloch_to_density(sites[k]));
  return out;
}

Vector vectorize(const ComplexOperator& op) {
  const Matrix& m = op.matrix();
  return Eigen::Map<const Vector>(m.data(), m.size());
}

ComplexOperator devectorize(const Vector& v) {
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (dim * dim != v.size()) throw std::invalid_argument("devectorize: length is not a square");
  return ComplexOperator(Eigen::Map<const Matrix>(v.data(), dim, dim));
}

}  // namespace dqm
