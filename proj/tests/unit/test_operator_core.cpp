#include "dqm/operator_core.hpp"
#include "generators.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

using namespace dqm;

namespace {

ComplexOperator proj(std::size_t dim, std::size_t i) {
  const Vector k = basis_ket(dim, i);
  return ket_bra(k, k);
}

// Partial trace by explicit index sums over a 2-spin register.
Matrix trace_second_by_hand(const Matrix& m) {
  Matrix out = Matrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) out(a, b) += m(2 * a + k, 2 * b + k);
  return out;
}

}  // namespace

TEST(ComplexOperator, RejectsNonPowerOfTwo) {
  EXPECT_THROW(ComplexOperator(Matrix::Zero(3, 3)), std::invalid_argument);
  EXPECT_THROW(ComplexOperator(Matrix::Zero(2, 4)), std::invalid_argument);
}

TEST(ComplexOperator, RejectsNonFinite) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ComplexOperator{m}, std::invalid_argument);
  m(0, 1) = Complex(0.0, std::numeric_limits<double>::infinity());
  EXPECT_THROW(ComplexOperator{m}, std::invalid_argument);
}

TEST(ComplexOperator, SpinsFromDimension) {
  EXPECT_EQ(ComplexOperator::identity(8).spins(), 3);
  EXPECT_EQ(ComplexOperator::zero(2).spins(), 1);
}

TEST(Pauli, ZIsDiagonal) {
  const auto z = pauli(PauliAxis::Z);
  EXPECT_EQ(z(0, 0), Complex(1.0));
  EXPECT_EQ(z(1, 1), Complex(-1.0));
  EXPECT_EQ(z(0, 1), Complex(0.0));
}

TEST(Pauli, LoweringMapsUpToDown) {
  const auto m = pauli(PauliAxis::Minus);
  EXPECT_EQ(m(1, 0), Complex(1.0));
  EXPECT_EQ(m(0, 1), Complex(0.0));
  EXPECT_EQ(m(0, 0), Complex(0.0));
  EXPECT_LT(pauli(PauliAxis::Plus).max_abs_diff(m.adjoint()), 1e-15);
}

TEST(Pauli, SquaresToIdentity) {
  for (auto a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
    EXPECT_LT((pauli(a) * pauli(a)).max_abs_diff(ComplexOperator::identity(2)), 1e-15);
  }
}

TEST(Pauli, LadderFromCartesian) {
  const auto expect = (pauli(PauliAxis::X) - Complex(0, 1) * pauli(PauliAxis::Y)) * Complex(0.5);
  EXPECT_LT(pauli(PauliAxis::Minus).max_abs_diff(expect), 1e-15);
}

TEST(Pauli, ParseAxis) {
  EXPECT_EQ(parse_pauli_axis("X"), PauliAxis::X);
  EXPECT_EQ(parse_pauli_axis("-"), PauliAxis::Minus);
  EXPECT_EQ(parse_pauli_axis("i"), PauliAxis::Identity);
  EXPECT_THROW(parse_pauli_axis("q"), std::invalid_argument);
  EXPECT_THROW(parse_pauli_axis("xy"), std::invalid_argument);
}

TEST(Bloch, PoleIsPure) {
  EXPECT_LT(bloch_to_density({0, 0, 1}).max_abs_diff(proj(2, 0)), 1e-15);
}

TEST(Bloch, OriginIsMaximallyMixed) {
  EXPECT_LT(bloch_to_density({0, 0, 0}).max_abs_diff(ComplexOperator::identity(2) * Complex(0.5)), 1e-15);
}

TEST(Bloch, PlusX) {
  Matrix e(2, 2);
  e << 0.5, 0.5, 0.5, 0.5;
  EXPECT_LT(bloch_to_density({1, 0, 0}).max_abs_diff(ComplexOperator(e)), 1e-15);
}

TEST(Bloch, RejectsOutsideBall) {
  EXPECT_THROW(bloch_to_density({1.0, 0.1, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(bloch_to_density({1.0 + 5e-13, 0.0, 0.0}));
}

TEST(Bloch, RecoversExpectations) {
  for (int t = 0; t < 50; ++t) {
    const BlochState s = gen::bloch();
    const auto rho = bloch_to_density(s);
    EXPECT_NEAR((pauli(PauliAxis::X) * rho).trace().real(), s.x, 1e-14);
    EXPECT_NEAR((pauli(PauliAxis::Y) * rho).trace().real(), s.y, 1e-14);
    EXPECT_NEAR((pauli(PauliAxis::Z) * rho).trace().real(), s.z, 1e-14);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
  }
}

TEST(Bloch, ClampedProjectsRadially) {
  const BlochState c = BlochState{3, 0, 4}.clamped();
  EXPECT_NEAR(c.x, 0.6, 1e-15);
  EXPECT_NEAR(c.z, 0.8, 1e-15);
  const BlochState inside{0.1, 0.2, 0.3};
  EXPECT_EQ(inside.clamped().y, 0.2);
}

TEST(Kron, Identities) {
  EXPECT_LT(kron(ComplexOperator::identity(2), ComplexOperator::identity(2)).max_abs_diff(ComplexOperator::identity(4)),
            1e-15);
}

TEST(Kron, BasisOrdering) {
  // |up><up| (x) |down><down| is |ud><ud|, basis index 1.
  EXPECT_LT(kron(proj(2, 0), proj(2, 1)).max_abs_diff(proj(4, 1)), 1e-15);
}

TEST(Kron, ZxEntry) {
  const auto zx = kron(pauli(PauliAxis::Z), pauli(PauliAxis::X));
  EXPECT_EQ(zx(1, 0), Complex(1.0));  // row ud, col uu
  EXPECT_EQ(zx(3, 2), Complex(-1.0));
}

TEST(Kron, DimensionCap) {
  const auto big = ComplexOperator::identity(64);
  EXPECT_THROW(kron(big, big, 2048), std::length_error);
  EXPECT_EQ(kron(big, big).dim(), 4096u);
}

TEST(Kron, MixedProductProperty) {
  for (int t = 0; t < 20; ++t) {
    const auto a = gen::complex_matrix(2), b = gen::complex_matrix(4);
    const auto c = gen::complex_matrix(2), d = gen::complex_matrix(4);
    EXPECT_LT((kron(a, b) * kron(c, d)).max_abs_diff(kron(a * c, b * d)), 1e-12);
  }
}

TEST(PartialTrace, FactorizedInput) {
  const auto a = gen::complex_matrix(2), b = gen::complex_matrix(2);
  const std::array<int, 1> keep = {0};
  EXPECT_LT(partial_trace(kron(a, b), keep, 2).max_abs_diff(a * b.trace()), 1e-13);
}

TEST(PartialTrace, BellMarginalIsMixed) {
  const Vector psi = bell_state(BellSign::Plus);
  const std::array<int, 1> keep = {0};
  EXPECT_LT(partial_trace(ket_bra(psi, psi), keep, 2).max_abs_diff(ComplexOperator::identity(2) * Complex(0.5)),
            1e-15);
}

TEST(PartialTrace, PreservesTrace) {
  for (int t = 0; t < 30; ++t) {
    const auto r = gen::complex_matrix(4);
    const std::array<int, 1> keep = {1};
    EXPECT_LT(std::abs(partial_trace(r, keep, 2).trace() - r.trace()), 1e-13);
  }
}

TEST(PartialTrace, MatchesIndexSum) {
  for (int t = 0; t < 30; ++t) {
    const auto r = gen::complex_matrix(4);
    const std::array<int, 1> keep = {0};
    EXPECT_LT((partial_trace(r, keep, 2).matrix() - trace_second_by_hand(r.matrix())).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(PartialTrace, MiddleSiteOfThree) {
  const auto a = gen::complex_matrix(2), b = gen::complex_matrix(2), c = gen::complex_matrix(2);
  const std::array<int, 2> keep = {0, 2};
  EXPECT_LT(partial_trace(kron(kron(a, b), c), keep, 3).max_abs_diff(kron(a, c) * b.trace()), 1e-13);
}

TEST(PartialTrace, InvalidSites) {
  const auto r = gen::complex_matrix(4);
  const std::array<int, 1> bad = {2};
  const std::array<int, 2> dup = {0, 0};
  EXPECT_THROW(partial_trace(r, bad, 2), std::out_of_range);
  EXPECT_THROW(partial_trace(r, dup, 2), std::invalid_argument);
  const std::array<int, 1> ok = {0};
  EXPECT_THROW(partial_trace(r, ok, 3), std::invalid_argument);
}

TEST(Embed, MatchesKronWithIdentity) {
  const auto a = gen::complex_matrix(4);
  const std::array<int, 2> sites = {0, 1};
  EXPECT_LT(embed(a, sites, 3).max_abs_diff(kron(a, ComplexOperator::identity(2))), 1e-15);
}

TEST(Embed, ReversedSitesSwapFactors) {
  const auto a = gen::complex_matrix(2), b = gen::complex_matrix(2);
  const std::array<int, 2> sites = {1, 0};
  EXPECT_LT(embed(kron(a, b), sites, 2).max_abs_diff(kron(b, a)), 1e-14);
}

TEST(Embed, NonAdjacentSites) {
  const auto a = gen::complex_matrix(2), b = gen::complex_matrix(2);
  const std::array<int, 2> sites = {0, 2};
  const auto expect = kron(kron(a, ComplexOperator::identity(2)), b);
  EXPECT_LT(embed(kron(a, b), sites, 3).max_abs_diff(expect), 1e-14);
}

TEST(Dissipator, DecayOfExcitedState) {
  const auto d = dissipator(pauli(PauliAxis::Minus), proj(2, 0));
  EXPECT_LT(d.max_abs_diff(proj(2, 1) - proj(2, 0)), 1e-15);
}

TEST(Dissipator, DarkStateAnnihilated) {
  // |ud> is dark for |dd><uu|.
  const auto c = ket_bra(basis_ket(4, 3), basis_ket(4, 0));
  EXPECT_LT(dissipator(c, proj(4, 1)).max_abs_diff(ComplexOperator::zero(4)), 1e-15);
}

TEST(Dissipator, Traceless) {
  for (int t = 0; t < 50; ++t) {
    const auto c = gen::complex_matrix(4), r = gen::complex_matrix(4);
    EXPECT_LT(std::abs(dissipator(c, r).trace()), 1e-12);
  }
}

TEST(Dissipator, PreservesHermiticity) {
  for (int t = 0; t < 20; ++t) {
    EXPECT_TRUE(dissipator(gen::complex_matrix(4), gen::hermitian(4)).is_hermitian(1e-12));
  }
}

TEST(Dissipator, DimensionMismatch) {
  EXPECT_THROW(dissipator(gen::complex_matrix(2), gen::complex_matrix(4)), std::invalid_argument);
}

TEST(TraceNorm, Diagonal) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = -0.5;
  EXPECT_NEAR(trace_norm_hermitian(ComplexOperator(m)), 1.0, 1e-15);
  EXPECT_EQ(trace_norm_hermitian(ComplexOperator::zero(4)), 0.0);
}

TEST(TraceNorm, MatchesSingularValues) {
  for (int t = 0; t < 50; ++t) {
    const auto h = gen::hermitian(8);
    Eigen::JacobiSVD<Matrix> svd(h.matrix());
    EXPECT_NEAR(trace_norm_hermitian(h), svd.singularValues().sum(), 1e-12);
  }
}

TEST(TraceNorm, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(trace_norm_hermitian(ComplexOperator(m)), std::domain_error);
}

TEST(TraceNorm, TriangleInequality) {
  for (int t = 0; t < 30; ++t) {
    const auto a = gen::hermitian(4), b = gen::hermitian(4);
    EXPECT_LE(trace_norm_hermitian(a + b), trace_norm_hermitian(a) + trace_norm_hermitian(b) + 1e-12);
  }
}

TEST(Bell, Components) {
  const double s = 1.0 / std::sqrt(2.0);
  const Vector p = bell_state(BellSign::Plus), m = bell_state(BellSign::Minus);
  EXPECT_NEAR(p(1).real(), s, 1e-15);
  EXPECT_NEAR(p(2).real(), s, 1e-15);
  EXPECT_NEAR(m(1).real(), s, 1e-15);
  EXPECT_NEAR(m(2).real(), -s, 1e-15);
  EXPECT_EQ(p(0), Complex(0.0));
  EXPECT_EQ(m(3), Complex(0.0));
  EXPECT_LT(std::abs(p.dot(m)), 1e-15);
}

TEST(Commutator, HamiltonianGeneratorIsTraceless) {
  for (int t = 0; t < 20; ++t) {
    const auto g = commutator_generator(gen::hermitian(4), gen::density(4));
    EXPECT_LT(std::abs(g.trace()), 1e-13);
    EXPECT_TRUE(g.is_hermitian(1e-12));
  }
}
