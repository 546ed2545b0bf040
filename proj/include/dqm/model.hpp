// Dissipative lattice models and the purely dissipative XXZ jump sets.

#pragma once

#include "dqm/operator_core.hpp"

#include <istream>
#include <string>
#include <vector>

namespace dqm {

struct LatticeSpec {
  int z = 6;
  bool bipartite = true;
  /// Divide two-site rates by (z - 1).
  bool renormalize = true;

  void validate() const;
  /// Factor applied to two-site rates (1 or 1/(z-1)).
  double pair_rate_scale() const;
};

/// A jump operator acting on one or two sites. The rate is folded into the
/// matrix: c = sqrt(rate) * unit matrix.
struct JumpTerm {
  int arity = 1;
  ComplexOperator matrix;
  std::string label;

  JumpTerm() = default;
  JumpTerm(int arity, ComplexOperator matrix, std::string label);
};

struct HamiltonianTerm {
  int arity = 1;
  ComplexOperator matrix;

  HamiltonianTerm() = default;
  HamiltonianTerm(int arity, ComplexOperator matrix);
};

struct DissipativeModel {
  LatticeSpec lattice;
  std::vector<HamiltonianTerm> hamiltonian_terms;
  std::vector<JumpTerm> jump_terms;

  bool purely_dissipative() const { return hamiltonian_terms.empty(); }
};

/// |uu><psi-|, |dd><psi-|, |psi+><psi-| at unit rate.
std::vector<JumpTerm> ferro_pump_jumps();

/// sqrt(lambda) * {|ud><uu|, |du><uu|, |ud><dd|, |du><dd|}.
std::vector<JumpTerm> anisotropy_jumps(double lambda);

enum class JumpSets { All, FerroOnly, AnisotropyOnly };

/// Purely dissipative XXZ model: the ferro pump set plus the anisotropy set.
/// With lattice.renormalize, every two-site matrix is divided by sqrt(z - 1).
DissipativeModel dissipative_heisenberg(double lambda, const LatticeSpec& lattice,
                                        JumpSets sets = JumpSets::All);

/// Two-site bond -J [xx + yy + (1 - lambda) zz] of the equilibrium XXZ model.
ComplexOperator xxz_hamiltonian(double J, double lambda);

enum class AnsatzKind { Uniform, Bipartite };

AnsatzKind parse_ansatz_kind(const std::string& s);
std::string to_string(AnsatzKind kind);

/// Contents of a `key = value` model file. Recognised keys: lambda, z,
/// bipartite, renormalize, ansatz, jumps (all | ferro | anisotropy).
struct ModelConfig {
  double lambda = 0.0;
  LatticeSpec lattice;
  AnsatzKind ansatz = AnsatzKind::Uniform;
  JumpSets jump_sets = JumpSets::All;

  DissipativeModel build() const { return dissipative_heisenberg(lambda, lattice, jump_sets); }
  DissipativeModel build(double lambda_override) const {
    return dissipative_heisenberg(lambda_override, lattice, jump_sets);
  }
};

/// Throws std::invalid_argument with the offending line number.
ModelConfig parse_model_config(std::istream& in);
ModelConfig load_model_config(const std::string& path);

}  // namespace dqm
