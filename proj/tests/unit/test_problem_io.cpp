#include "dqm/problem_io.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dqm;

namespace {

EliminationProblem parse(const std::string& text) {
  std::istringstream in(text);
  return parse_elimination_problem(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

const char* kSingle = R"(spins 1
aux 1
[coupling]
0.05 0   0:|-><+|  1:+
0.05 0   0:|+><-|  1:-
[jump rate=1]
1 0   1:-
)";

}  // namespace

TEST(ProblemIo, SingleSpinMatchesBuiltin) {
  const auto parsed = parse(kSingle);
  const auto builtin = single_spin_pump_problem(0.05, 1.0);
  ASSERT_EQ(parsed.channels(), 1u);
  EXPECT_LT(parsed.v_plus[0].max_abs_diff(builtin.v_plus[0]), 1e-15);
  EXPECT_LT(parsed.v_minus[0].max_abs_diff(builtin.v_minus[0]), 1e-15);
  EXPECT_LT(parsed.jumps[0].unit.max_abs_diff(builtin.jumps[0].unit), 1e-15);
  EXPECT_LT(parsed.excited_projector.max_abs_diff(builtin.excited_projector), 1e-15);
}

TEST(ProblemIo, BellPumpMatchesBuiltin) {
  const auto parsed = parse(R"(spins 2
aux 1
[V_plus 0]
0.05 0  0,1:|psi+><psi-|  2:+
[jump 0 rate=1]
1 0  2:-
)");
  const auto builtin = bell_pump_problem(0.05, 1.0);
  EXPECT_LT(parsed.v_plus[0].max_abs_diff(builtin.v_plus[0]), 1e-15);
  EXPECT_LT(parsed.v_minus[0].max_abs_diff(builtin.v_minus[0]), 1e-15);
}

TEST(ProblemIo, PauliFormOfCoupling) {
  // E0 (sx sx + sy sy)/2 on (system, aux) splits into E0 (s+ s- + s- s+), whose
  // raising part is E0 s- (x) s+.
  const auto p = parse(R"(spins 1
aux 1
[coupling]
0.5 0 0:x 1:x
0.5 0 0:y 1:y
[jump rate=2]
1 0 1:-
)");
  const auto expect = kron(pauli(PauliAxis::Minus), pauli(PauliAxis::Plus));
  EXPECT_LT(p.v_plus[0].max_abs_diff(expect), 1e-15);
  EXPECT_DOUBLE_EQ(p.jumps[0].rate, 2.0);
}

TEST(ProblemIo, IdentityTermAndComments) {
  const auto op = parse_operator("# constant\n2 0\n0 1 0:z  # imaginary z\n", 1);
  EXPECT_EQ(op(0, 0), Complex(2.0, 1.0));
  EXPECT_EQ(op(1, 1), Complex(2.0, -1.0));
}

TEST(ProblemIo, FactorsMultiplyLeftToRight) {
  const auto op = parse_operator("1 0 0:x 0:z\n", 1);
  EXPECT_LT(op.max_abs_diff(pauli(PauliAxis::X) * pauli(PauliAxis::Z)), 1e-15);
}

TEST(ProblemIo, KetBraLabels) {
  const auto op = parse_operator("1 0 1,0:|ud><dd|\n", 2);
  // Site 1 carries u in the ket, site 0 carries d: ket |du>, bra |dd>.
  EXPECT_LT(op.max_abs_diff(ket_bra(basis_ket(4, 2), basis_ket(4, 3))), 1e-15);
}

TEST(ProblemIo, ZeroCouplingProblem) {
  const auto p = parse(R"(spins 1
aux 1
[H_g]
0.5 0 0:z
[coupling]
0 0 0:x 1:x
[jump rate=1]
1 0 1:-
)");
  const auto eff = eliminate(p);
  EXPECT_LT(eff.h_eff.max_abs_diff(p.h_ground), 1e-15);
  EXPECT_EQ(eff.c_eff[0].matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProblemIo, ErrorLines) {
  EXPECT_EQ(error_line("spins 1\naux 1\n[coupling]\n0.1 0 0:q\n[jump rate=1]\n1 0 1:-\n"), 4);
  EXPECT_EQ(error_line("spins 1\naux 1\n[coupling]\n0.1 0 5:x\n"), 4);
  EXPECT_EQ(error_line("spins 1\naux 1\n[bogus]\n"), 3);
  EXPECT_EQ(error_line("spins 1\n[H_g]\n"), 2);
  EXPECT_EQ(error_line("spins 1\naux 1\n[jump]\n1 0 1:-\n"), 3);
  EXPECT_EQ(error_line("spins 1\naux 1\n[coupling]\nabc 0 0:x\n"), 4);
  EXPECT_EQ(error_line("spins 1\naux 1\n[coupling]\n1 0 0:|psi+><psi-|\n"), 4);
  EXPECT_EQ(error_line("spins 1\naux 1\n[coupling]\n0 1 0:x 1:x\n[jump rate=1]\n1 0 1:-\n"), 3);
  EXPECT_EQ(error_line("spins 1\naux 1\n[coupling]\n1 0 0:x 1:x\n"), 3);
}

TEST(ProblemIo, PauliExpansionRoundTrip) {
  for (int t = 0; t < 10; ++t) {
    const auto h = gen::complex_matrix(8);
    const auto back = parse_operator(pauli_expansion(h), 3);
    EXPECT_LT(back.max_abs_diff(h), 1e-10);
  }
}

TEST(ProblemIo, PauliExpansionOfZero) { EXPECT_EQ(pauli_expansion(ComplexOperator::zero(2)), "0 0\n"); }
