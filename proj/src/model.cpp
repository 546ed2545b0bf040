#include "dqm/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dqm {

namespace {

// Two-spin basis indices.
constexpr std::size_t kUU = 0;
constexpr std::size_t kUD = 1;
constexpr std::size_t kDU = 2;
constexpr std::size_t kDD = 3;

Vector ket2(std::size_t index) { return basis_ket(4, index); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool parse_bool(const std::string& v, int line) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("config line " + std::to_string(line) + ": expected boolean, got '" + v + "'");
}

double parse_double(const std::string& v, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": expected number, got '" + v + "'");
  }
  return out;
}

}  // namespace

void LatticeSpec::validate() const {
  if (z < 2) throw std::invalid_argument("coordination number z must be >= 2");
}

double LatticeSpec::pair_rate_scale() const {
  validate();
  return renormalize ? 1.0 / static_cast<double>(z - 1) : 1.0;
}

JumpTerm::JumpTerm(int arity_, ComplexOperator matrix_, std::string label_)
    : arity(arity_), matrix(std::move(matrix_)), label(std::move(label_)) {
  if (arity != 1 && arity != 2) throw std::invalid_argument("JumpTerm: arity must be 1 or 2");
  if (matrix.dim() != (std::size_t{1} << arity)) {
    throw std::invalid_argument("JumpTerm: matrix dimension does not match arity");
  }
}

HamiltonianTerm::HamiltonianTerm(int arity_, ComplexOperator matrix_)
    : arity(arity_), matrix(std::move(matrix_)) {
  if (arity != 1 && arity != 2) throw std::invalid_argument("HamiltonianTerm: arity must be 1 or 2");
  if (matrix.dim() != (std::size_t{1} << arity)) {
    throw std::invalid_argument("HamiltonianTerm: matrix dimension does not match arity");
  }
  if (!matrix.is_hermitian()) throw std::invalid_argument("HamiltonianTerm: matrix is not Hermitian");
}

std::vector<JumpTerm> ferro_pump_jumps() {
  const Vector psi_minus = bell_state(BellSign::Minus);
  const Vector psi_plus = bell_state(BellSign::Plus);
  return {
      JumpTerm(2, ket_bra(ket2(kUU), psi_minus), "|uu><psi-|"),
      JumpTerm(2, ket_bra(ket2(kDD), psi_minus), "|dd><psi-|"),
      JumpTerm(2, ket_bra(psi_plus, psi_minus), "|psi+><psi-|"),
  };
}

std::vector<JumpTerm> anisotropy_jumps(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("anisotropy_jumps: lambda must be finite and >= 0");
  }
  const double s = std::sqrt(lambda);
  return {
      JumpTerm(2, s * ket_bra(ket2(kUD), ket2(kUU)), "|ud><uu|"),
      JumpTerm(2, s * ket_bra(ket2(kDU), ket2(kUU)), "|du><uu|"),
      JumpTerm(2, s * ket_bra(ket2(kUD), ket2(kDD)), "|ud><dd|"),
      JumpTerm(2, s * ket_bra(ket2(kDU), ket2(kDD)), "|du><dd|"),
  };
}

DissipativeModel dissipative_heisenberg(double lambda, const LatticeSpec& lattice, JumpSets sets) {
  lattice.validate();
  DissipativeModel model;
  model.lattice = lattice;
  if (sets != JumpSets::AnisotropyOnly) {
    for (auto& j : ferro_pump_jumps()) model.jump_terms.push_back(std::move(j));
  }
  if (sets != JumpSets::FerroOnly) {
    for (auto& j : anisotropy_jumps(lambda)) model.jump_terms.push_back(std::move(j));
  } else if (!(lambda >= 0.0)) {
    throw std::invalid_argument("dissipative_heisenberg: lambda must be >= 0");
  }
  const double amp = std::sqrt(lattice.pair_rate_scale());
  for (auto& j : model.jump_terms) {
    if (j.arity == 2) j.matrix *= amp;
  }
  return model;
}

ComplexOperator xxz_hamiltonian(double J, double lambda) {
  const auto sx = pauli(PauliAxis::X);
  const auto sy = pauli(PauliAxis::Y);
  const auto sz = pauli(PauliAxis::Z);
  return Complex(-J) * (kron(sx, sx) + kron(sy, sy) + Complex(1.0 - lambda) * kron(sz, sz));
}

AnsatzKind parse_ansatz_kind(const std::string& s) {
  const std::string v = lower(s);
  if (v == "uniform") return AnsatzKind::Uniform;
  if (v == "bipartite") return AnsatzKind::Bipartite;
  throw std::invalid_argument("unknown ansatz '" + s + "' (expected uniform|bipartite)");
}

std::string to_string(AnsatzKind kind) { return kind == AnsatzKind::Uniform ? "uniform" : "bipartite"; }

ModelConfig parse_model_config(std::istream& in) {
  ModelConfig cfg;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "lambda") {
      cfg.lambda = parse_double(value, line_no);
      if (cfg.lambda < 0.0) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": lambda must be >= 0");
      }
    } else if (key == "z") {
      const double z = parse_double(value, line_no);
      if (z != std::floor(z) || z < 2) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": z must be an integer >= 2");
      }
      cfg.lattice.z = static_cast<int>(z);
    } else if (key == "bipartite") {
      cfg.lattice.bipartite = parse_bool(value, line_no);
    } else if (key == "renormalize") {
      cfg.lattice.renormalize = parse_bool(value, line_no);
    } else if (key == "ansatz") {
      try {
        cfg.ansatz = parse_ansatz_kind(value);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
      }
    } else if (key == "jumps") {
      const std::string v = lower(value);
      if (v == "all") cfg.jump_sets = JumpSets::All;
      else if (v == "ferro") cfg.jump_sets = JumpSets::FerroOnly;
      else if (v == "anisotropy") cfg.jump_sets = JumpSets::AnisotropyOnly;
      else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown jump set '" + value + "'");
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.ansatz == AnsatzKind::Bipartite && !cfg.lattice.bipartite) {
    throw std::invalid_argument("config: bipartite ansatz requires a bipartite lattice");
  }
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_model_config(in);
}

}  // namespace dqm
