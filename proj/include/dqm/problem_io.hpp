// Plain-text operator files for the elimination front end.
//
//   spins 1            # system spins
//   aux 1              # auxiliary spins, appended after the system spins
//   [H_g]              # optional, Hermitian; default zero
//   [H_e]              # optional, Hermitian; default zero
//   [coupling k]       # full Hermitian coupling V, split into V+ = P V (1-P), V- = (V+)^dag
//   [V_plus k]         # alternative: V+ given directly
//   [V_minus k]        # optional with V_plus; default (V+)^dag
//   [jump k rate=g]    # decay channel k: unit operator with rate g
//   [projector]        # optional excited-manifold projector; default "some auxiliary spin up"
//
// Each term line is `re im factor factor ...`. A factor is either a Pauli
// factor `site:axis` (axis one of x y z + - i) or a ket-bra `s0,s1:|ket><bra|`
// with labels u, d (one letter per listed site), + and - (x basis, one site)
// or psi+ and psi- (two sites, (|ud> +- |du>)/sqrt2). Factors multiply left to
// right; a line without factors is the identity. `#` starts a comment. The
// channel index k may be omitted and defaults to 0.

#pragma once

#include "dqm/effective_ops.hpp"
#include "dqm/operator_core.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace dqm {

class ParseError : public std::invalid_argument {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

EliminationProblem parse_elimination_problem(std::istream& in);
EliminationProblem load_elimination_problem(const std::string& path);

/// Single operator term list on n spins, same syntax as a section body.
ComplexOperator parse_operator(const std::string& text, int n);

/// Expansion sum_s c_s P_s over Pauli strings, one `re im 0:x 1:z` line per
/// nonzero coefficient (identity factors omitted).
std::string pauli_expansion(const ComplexOperator& op, double tol = 1e-12);

/// Dense matrix, one row per line, entries printed as re+imi.
std::string dense_matrix(const ComplexOperator& op, int precision = 6);

}  // namespace dqm
