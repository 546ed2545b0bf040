#include "dqm/problem_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace dqm {

ParseError::ParseError(int line, const std::string& what)
    : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string strip(const std::string& s) {
  const auto hash = s.find('#');
  std::string t = s.substr(0, hash);
  const auto b = t.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = t.find_last_not_of(" \t\r");
  return t.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a real number, got '" + tok + "'");
  }
}

int parse_int(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
}

// Ket for a label over `sites` spins: u/d strings, +/- (one site), psi+/psi- (two sites).
Vector label_ket(const std::string& label, std::size_t sites, int line) {
  if (label == "+" || label == "-") {
    if (sites != 1) throw ParseError(line, "label '" + label + "' needs exactly one site");
    Vector v(2);
    v << 1.0, (label == "+" ? 1.0 : -1.0);
    return v / std::sqrt(2.0);
  }
  if (label == "psi+" || label == "psi-") {
    if (sites != 2) throw ParseError(line, "label '" + label + "' needs exactly two sites");
    return bell_state(label == "psi+" ? BellSign::Plus : BellSign::Minus);
  }
  if (label.size() != sites) {
    throw ParseError(line, "label '" + label + "' has " + std::to_string(label.size()) + " letters for " +
                               std::to_string(sites) + " sites");
  }
  std::size_t index = 0;
  for (char c : label) {
    if (c != 'u' && c != 'd') throw ParseError(line, "unknown ket label '" + label + "'");
    index = 2 * index + (c == 'd' ? 1 : 0);
  }
  return basis_ket(std::size_t{1} << sites, index);
}

std::vector<int> parse_sites(const std::string& s, int n, int line) {
  std::vector<int> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    const int site = parse_int(tok, line);
    if (site < 0 || site >= n) {
      throw ParseError(line, "site " + std::to_string(site) + " out of range for " + std::to_string(n) + " spins");
    }
    if (std::find(out.begin(), out.end(), site) != out.end()) throw ParseError(line, "repeated site in '" + s + "'");
    out.push_back(site);
  }
  if (out.empty()) throw ParseError(line, "missing site list");
  return out;
}

ComplexOperator parse_factor(const std::string& tok, int n, int line) {
  const auto colon = tok.find(':');
  if (colon == std::string::npos) throw ParseError(line, "factor '" + tok + "' lacks 'site:'");
  const auto sites = parse_sites(tok.substr(0, colon), n, line);
  const std::string body = tok.substr(colon + 1);
  if (!body.empty() && body.front() == '|') {
    const auto mid = body.find("><");
    if (mid == std::string::npos || body.back() != '|') throw ParseError(line, "malformed ket-bra '" + body + "'");
    const std::string ket = body.substr(1, mid - 1);
    const std::string bra = body.substr(mid + 2, body.size() - mid - 3);
    const ComplexOperator kb = ket_bra(label_ket(ket, sites.size(), line), label_ket(bra, sites.size(), line));
    return embed(kb, sites, n);
  }
  if (sites.size() != 1) throw ParseError(line, "Pauli factor '" + tok + "' takes one site");
  try {
    return embed(pauli(parse_pauli_axis(body)), sites, n);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

ComplexOperator parse_term(const std::string& text, int n, int line) {
  const auto toks = split_ws(text);
  if (toks.size() < 2) throw ParseError(line, "term needs 're im' coefficients");
  const Complex coeff(parse_real(toks[0], line), parse_real(toks[1], line));
  ComplexOperator op = ComplexOperator::identity(std::size_t{1} << n);
  for (std::size_t i = 2; i < toks.size(); ++i) op = op * parse_factor(toks[i], n, line);
  return coeff * op;
}

enum class SectionKind { Hg, He, Coupling, VPlus, VMinus, Jump, Projector };

struct Section {
  SectionKind kind;
  int channel = 0;
  double rate = 0.0;
  int line = 0;
  std::optional<ComplexOperator> op;
};

Section parse_header(const std::string& text, int line) {
  const auto toks = split_ws(text.substr(1, text.size() - 2));
  if (toks.empty()) throw ParseError(line, "empty section header");
  Section s;
  s.line = line;
  const std::string& name = toks[0];
  static const std::map<std::string, SectionKind> kinds = {
      {"H_g", SectionKind::Hg},           {"H_e", SectionKind::He},         {"coupling", SectionKind::Coupling},
      {"V_plus", SectionKind::VPlus},     {"V_minus", SectionKind::VMinus}, {"jump", SectionKind::Jump},
      {"projector", SectionKind::Projector}};
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw ParseError(line, "unknown section '" + name + "'");
  s.kind = it->second;
  bool have_rate = false;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t.rfind("rate=", 0) == 0) {
      if (s.kind != SectionKind::Jump) throw ParseError(line, "rate= only applies to [jump]");
      s.rate = parse_real(t.substr(5), line);
      if (!(s.rate > 0.0)) throw ParseError(line, "decay rate must be positive");
      have_rate = true;
    } else {
      s.channel = parse_int(t, line);
      if (s.channel < 0) throw ParseError(line, "negative channel index");
    }
  }
  if (s.kind == SectionKind::Jump && !have_rate) throw ParseError(line, "[jump] needs rate=");
  return s;
}

}  // namespace

ComplexOperator parse_operator(const std::string& text, int n) {
  if (n < 1) throw std::invalid_argument("parse_operator: need at least one spin");
  ComplexOperator out = ComplexOperator::zero(std::size_t{1} << n);
  std::istringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = strip(raw);
    if (!line.empty()) out += parse_term(line, n, line_no);
  }
  return out;
}

EliminationProblem parse_elimination_problem(std::istream& in) {
  int system = -1, aux = -1;
  std::vector<Section> sections;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      if (system < 1 || aux < 1) throw ParseError(line_no, "'spins' and 'aux' must precede the first section");
      Section s = parse_header(line, line_no);
      for (const auto& prev : sections) {
        if (prev.kind == s.kind && prev.channel == s.channel) throw ParseError(line_no, "duplicate section");
      }
      s.op = ComplexOperator::zero(std::size_t{1} << (system + aux));
      sections.push_back(std::move(s));
      continue;
    }
    if (sections.empty()) {
      const auto toks = split_ws(line);
      if (toks.size() != 2) throw ParseError(line_no, "expected 'spins N' or 'aux M'");
      if (toks[0] == "spins") system = parse_int(toks[1], line_no);
      else if (toks[0] == "aux") aux = parse_int(toks[1], line_no);
      else throw ParseError(line_no, "unknown header key '" + toks[0] + "'");
      if ((toks[0] == "spins" ? system : aux) < 1) throw ParseError(line_no, "spin counts must be positive");
      if (system > 0 && aux > 0 && system + aux > 12) throw ParseError(line_no, "more than 12 spins in total");
      continue;
    }
    *sections.back().op += parse_term(line, system + aux, line_no);
  }
  if (system < 1 || aux < 1) throw ParseError(line_no, "missing 'spins' or 'aux' declaration");

  EliminationProblem p;
  p.system_spins = system;
  p.aux_spins = aux;
  const std::size_t dim = std::size_t{1} << (system + aux);
  p.h_ground = ComplexOperator::zero(dim);
  p.h_excited = ComplexOperator::zero(dim);
  p.excited_projector = auxiliary_excited_projector(system, aux);

  std::map<int, const Section*> coupling, vplus, vminus, jumps;
  for (const auto& s : sections) {
    switch (s.kind) {
      case SectionKind::Hg:
        p.h_ground = *s.op;
        break;
      case SectionKind::He:
        p.h_excited = *s.op;
        break;
      case SectionKind::Projector:
        p.excited_projector = *s.op;
        break;
      case SectionKind::Coupling:
        coupling[s.channel] = &s;
        break;
      case SectionKind::VPlus:
        vplus[s.channel] = &s;
        break;
      case SectionKind::VMinus:
        vminus[s.channel] = &s;
        break;
      case SectionKind::Jump:
        jumps[s.channel] = &s;
        break;
    }
  }

  const ComplexOperator& P = p.excited_projector;
  const ComplexOperator Q = ComplexOperator::identity(dim) - P;
  int expected = 0;
  for (const auto& [k, js] : jumps) {
    if (k != expected++) throw ParseError(js->line, "jump channels must be numbered 0, 1, 2, ...");
    const bool has_c = coupling.count(k) != 0, has_v = vplus.count(k) != 0;
    if (has_c == has_v) {
      throw ParseError(js->line, "channel " + std::to_string(k) + " needs exactly one of [coupling] or [V_plus]");
    }
    ComplexOperator vp = has_c ? P * *coupling[k]->op * Q : *vplus[k]->op;
    if (has_c && !coupling[k]->op->is_hermitian()) throw ParseError(coupling[k]->line, "coupling must be Hermitian");
    p.v_plus.push_back(vp);
    p.v_minus.push_back(vminus.count(k) ? *vminus[k]->op : vp.adjoint());
    p.jumps.push_back(DecayChannel{*js->op, js->rate});
  }
  for (const auto* m : {&coupling, &vplus, &vminus})
    for (const auto& [k, s] : *m)
      if (!jumps.count(k)) throw ParseError(s->line, "channel " + std::to_string(k) + " has no [jump] section");

  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
  return p;
}

EliminationProblem load_elimination_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
  return parse_elimination_problem(in);
}

std::string pauli_expansion(const ComplexOperator& op, double tol) {
  const int n = op.spins();
  static const std::array<PauliAxis, 4> basis = {PauliAxis::Identity, PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
  static const char* names = "ixyz";
  std::ostringstream out;
  const std::size_t strings = std::size_t{1} << (2 * n);
  const double dim = static_cast<double>(op.dim());
  bool any = false;
  for (std::size_t code = 0; code < strings; ++code) {
    ComplexOperator p = pauli(basis[(code >> (2 * (n - 1))) & 3]);
    for (int s = 1; s < n; ++s) p = kron(p, pauli(basis[(code >> (2 * (n - 1 - s))) & 3]));
    const Complex c = (p * op).trace() / dim;
    if (std::abs(c) <= tol) continue;
    any = true;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g %.12g", c.real(), c.imag());
    out << buf;
    for (int s = 0; s < n; ++s) {
      const auto a = (code >> (2 * (n - 1 - s))) & 3;
      if (a != 0) out << ' ' << s << ':' << names[a];
    }
    out << '\n';
  }
  if (!any) out << "0 0\n";
  return out.str();
}

std::string dense_matrix(const ComplexOperator& op, int precision) {
  std::ostringstream out;
  const Matrix& m = op.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      char buf[96];
      const double re = std::abs(m(r, c).real()) < 1e-15 ? 0.0 : m(r, c).real();
      const double im = std::abs(m(r, c).imag()) < 1e-15 ? 0.0 : m(r, c).imag();
      std::snprintf(buf, sizeof buf, "%s%.*g%+.*gi", c ? "  " : "", precision, re, precision, im);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dqm
