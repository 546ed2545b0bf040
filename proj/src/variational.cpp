#include "dqm/variational.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace dqm {

namespace {

constexpr std::array<PauliAxis, 4> kPauliBasis = {PauliAxis::Identity, PauliAxis::X, PauliAxis::Y, PauliAxis::Z};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const Matrix& identity2() {
  static const Matrix id = Matrix::Identity(2, 2);
  return id;
}

Matrix kron_m(const Matrix& a, const Matrix& b) { return kron(ComplexOperator(a), ComplexOperator(b)).matrix(); }

std::array<double, 4> pauli_expectations(const BlochState& s) { return {1.0, s.x, s.y, s.z}; }

ComplexOperator mean_field_generator(const ComplexOperator& h_bond, PairSlot slot, const BlochState& neighbor) {
  if (h_bond.dim() != 4) throw std::invalid_argument("mean_field_hamiltonian_term: bond operator must be 4x4");
  const auto expect = pauli_expectations(neighbor);
  Matrix a_eff = Matrix::Zero(2, 2);
  for (std::size_t a = 0; a < 4; ++a) {
    const ComplexOperator pa = pauli(kPauliBasis[a]);
    for (std::size_t b = 0; b < 4; ++b) {
      if (b > 0 && expect[b] == 0.0) continue;
      const ComplexOperator basis = kron(pa, pauli(kPauliBasis[b]));
      const Complex coeff = (basis * h_bond).trace() / 4.0;
      a_eff += coeff * expect[b] * pa.matrix();
    }
  }
  return slot == PairSlot::I ? ComplexOperator(kron_m(a_eff, identity2())) : ComplexOperator(kron_m(identity2(), a_eff));
}

void require_bipartite(const DissipativeModel& model, const ProductAnsatz& ansatz) {
  if (ansatz.kind == AnsatzKind::Bipartite && !model.lattice.bipartite) {
    throw std::invalid_argument("bipartite ansatz requested on a non-bipartite lattice");
  }
}

}  // namespace

ComplexOperator mean_field_hamiltonian_term(const ComplexOperator& h_bond, PairSlot slot, const BlochState& neighbor) {
  return mean_field_generator(h_bond, slot, neighbor);
}

ComplexOperator mean_field_jump_term(const ComplexOperator& c_bond, PairSlot slot, const BlochState& neighbor,
                                     const ComplexOperator& pair_state) {
  if (c_bond.dim() != 4 || pair_state.dim() != 4) {
    throw std::invalid_argument("mean_field_jump_term: bond jump and pair state must be 4x4");
  }
  const ComplexOperator c3 = embed(c_bond, std::array<int, 2>{static_cast<int>(slot), 2}, 3);
  const ComplexOperator rho3 = kron(pair_state, bloch_to_density(neighbor));
  return partial_trace(dissipator(c3, rho3), std::array<int, 2>{0, 1}, 3);
}

BondFunctional::BondFunctional(const DissipativeModel& model) : model_(model) {
  model_.lattice.validate();
  for (const auto& j : model_.jump_terms) {
    if (j.arity == 2) {
      const Mat4 c = j.matrix.matrix();
      pair_jumps_.push_back(c);
      pair_cdc_ += c.adjoint() * c;
    } else {
      const Mat2 c = j.matrix.matrix();
      site_jumps_.push_back(c);
      site_cdc_ += c.adjoint() * c;
    }
  }
  for (const auto& h : model_.hamiltonian_terms) {
    if (h.arity == 2) h_pair_ += h.matrix.matrix();
    else h_site_ += h.matrix.matrix();
  }
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const Matrix basis = kron_m(pauli(kPauliBasis[a]).matrix(), pauli(kPauliBasis[b]).matrix());
      h_pauli_(a, b) = (basis * h_pair_).trace() / 4.0;
    }
}

BondFunctional::Mat2 BondFunctional::traced_pair_dissipator(const Mat2& rho_s, const Mat2& rho_k) const {
  Mat4 y;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) y.block<2, 2>(2 * r, 2 * c) = rho_s(r, c) * rho_k;
  Mat4 d = -0.5 * (pair_cdc_ * y + y * pair_cdc_);
  for (const auto& c : pair_jumps_) d.noalias() += c * y * c.adjoint();
  Mat2 out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out(r, c) = d(2 * r, 2 * c) + d(2 * r + 1, 2 * c + 1);
  return out;
}

BondFunctional::Mat2 BondFunctional::mean_field_field(const Mat2& rho_k) const {
  // <sigma_b> = tr(sigma_b rho_k)
  const std::array<Complex, 4> expect = {rho_k.trace(), rho_k(0, 1) + rho_k(1, 0),
                                         Complex(0.0, 1.0) * (rho_k(0, 1) - rho_k(1, 0)), rho_k(0, 0) - rho_k(1, 1)};
  Mat2 out = Mat2::Zero();
  for (std::size_t a = 0; a < 4; ++a) {
    Complex w = 0.0;
    for (std::size_t b = 0; b < 4; ++b) w += h_pauli_(a, b) * expect[b];
    if (w != Complex(0.0)) out += w * Mat2(pauli(kPauliBasis[a]).matrix());
  }
  return out;
}

namespace {

Eigen::Matrix4cd kron22(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return out;
}

}  // namespace

void BondFunctional::parts(const ProductAnsatz& ansatz, Mat4& loc, Mat4& inter, Mat4& mf) const {
  require_bipartite(model_, ansatz);
  const BlochState& sa = ansatz.a;
  const BlochState& sb = ansatz.kind == AnsatzKind::Uniform ? ansatz.a : ansatz.b;
  const Mat2 rho_a = bloch_to_density(sa).matrix();
  const Mat2 rho_b = bloch_to_density(sb).matrix();
  const Mat4 pair = kron22(rho_a, rho_b);
  const Complex minus_i{0.0, -1.0};
  const Mat2 id = Mat2::Identity();

  // One-site terms act on each site of the pair separately.
  Mat2 dl_a = minus_i * (h_site_ * rho_a - rho_a * h_site_) - 0.5 * (site_cdc_ * rho_a + rho_a * site_cdc_);
  Mat2 dl_b = minus_i * (h_site_ * rho_b - rho_b * h_site_) - 0.5 * (site_cdc_ * rho_b + rho_b * site_cdc_);
  for (const auto& c : site_jumps_) {
    dl_a += c * rho_a * c.adjoint();
    dl_b += c * rho_b * c.adjoint();
  }
  loc = kron22(dl_a, rho_b) + kron22(rho_a, dl_b);

  inter = minus_i * (h_pair_ * pair - pair * h_pair_) - 0.5 * (pair_cdc_ * pair + pair * pair_cdc_);
  for (const auto& c : pair_jumps_) inter.noalias() += c * pair * c.adjoint();

  // Site i (sublattice A) couples to outside neighbours on B and vice versa.
  // For a product pair the trace over the neighbour factorizes onto one site.
  const Mat2 x_i = traced_pair_dissipator(rho_a, rho_b);
  const Mat2 x_j = traced_pair_dissipator(rho_b, rho_a);
  const Mat4 g = kron22(mean_field_field(rho_b), id) + kron22(id, mean_field_field(rho_a));
  mf = kron22(x_i, rho_b) + kron22(rho_a, x_j) + minus_i * (g * pair - pair * g);
  mf *= static_cast<double>(model_.lattice.z - 1);
}

NormBreakdown BondFunctional::breakdown(const ProductAnsatz& ansatz) const {
  Mat4 loc, inter, mf;
  parts(ansatz, loc, inter, mf);
  NormBreakdown out{ComplexOperator(Matrix(loc)), ComplexOperator(Matrix(inter)), ComplexOperator(Matrix(mf)), 0.0};
  out.total_norm = trace_norm_hermitian(out.total());
  return out;
}

double BondFunctional::norm(const ProductAnsatz& ansatz) const {
  Mat4 loc, inter, mf;
  parts(ansatz, loc, inter, mf);
  const Mat4 d = loc + inter + mf;
  const Mat4 h = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat4> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().sum();
}

NormBreakdown reduced_derivative(const DissipativeModel& model, const ProductAnsatz& ansatz) {
  return BondFunctional(model).breakdown(ansatz);
}

namespace {

// Parameter layouts:
//   uniform,   gauge fixed: (ax, az)
//   uniform,   free:        (ax, ay, az)
//   bipartite, gauge fixed: (ax, az, bx, by, bz)
//   bipartite, free:        (ax, ay, az, bx, by, bz)
struct Layout {
  AnsatzKind kind;
  bool gauge_fix;

  std::size_t size() const {
    const std::size_t a = gauge_fix ? 2 : 3;
    return kind == AnsatzKind::Uniform ? a : a + 3;
  }

  std::size_t b_offset() const { return gauge_fix ? 2 : 3; }

  BlochState a_of(std::span<const double> p) const {
    return gauge_fix ? BlochState{p[0], 0.0, p[1]} : BlochState{p[0], p[1], p[2]};
  }

  ProductAnsatz decode(std::span<const double> p) const {
    const BlochState a = a_of(p);
    if (kind == AnsatzKind::Uniform) return ProductAnsatz::uniform(a);
    const std::size_t o = b_offset();
    return ProductAnsatz::bipartite(a, BlochState{p[o], p[o + 1], p[o + 2]});
  }

  std::vector<double> encode(const BlochState& a, const BlochState& b) const {
    std::vector<double> p;
    if (gauge_fix) p = {a.x, a.z};
    else p = {a.x, a.y, a.z};
    if (kind == AnsatzKind::Bipartite) p.insert(p.end(), {b.x, b.y, b.z});
    return p;
  }

  void project(std::span<double> p) const {
    auto clamp_block = [](std::span<double> v) {
      double r2 = 0.0;
      for (double x : v) r2 += x * x;
      if (r2 > 1.0) {
        const double r = std::sqrt(r2);
        for (double& x : v) x /= r;
      }
    };
    clamp_block(p.subspan(0, b_offset()));
    if (kind == AnsatzKind::Bipartite) clamp_block(p.subspan(b_offset(), 3));
  }
};

BlochState random_in_ball(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const BlochState s{u(rng), u(rng), u(rng)};
    if (s.length() <= 0.95) return s;
  }
}

std::vector<std::pair<BlochState, BlochState>> restart_seeds(int restarts, std::uint64_t seed) {
  std::vector<std::pair<BlochState, BlochState>> seeds = {
      {{0.8, 0.0, 0.0}, {0.8, 0.0, 0.0}},    // +x
      {{-0.8, 0.0, 0.0}, {-0.8, 0.0, 0.0}},  // -x
      {{0.0, 0.0, 0.8}, {0.0, 0.0, 0.8}},    // +z
      {{0.0, 0.0, -0.8}, {0.0, 0.0, -0.8}},  // -z
      {{0.0, 0.0, 0.8}, {0.0, 0.0, -0.8}},   // Neel
      {{0.4, 0.0, 0.4}, {0.4, 0.0, -0.4}},   // mixed
      {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}},    // origin
  };
  std::mt19937_64 rng(seed);
  while (static_cast<int>(seeds.size()) < restarts) seeds.emplace_back(random_in_ball(rng), random_in_ball(rng));
  seeds.resize(static_cast<std::size_t>(restarts));
  return seeds;
}

}  // namespace

MinimizeResult minimize_norm(const DissipativeModel& model, AnsatzKind kind, const MinimizeOptions& options) {
  if (options.restarts < 1) throw std::invalid_argument("minimize_norm: restarts must be >= 1");
  const ProductAnsatz probe = kind == AnsatzKind::Uniform ? ProductAnsatz::uniform({}) : ProductAnsatz::bipartite({}, {});
  require_bipartite(model, probe);

  const BondFunctional functional(model);
  const Layout layout{kind, options.gauge_fix};
  const Objective f = [&](std::span<const double> p) { return functional.norm(layout.decode(p)); };
  const Projection project = [&](std::span<double> p) { layout.project(p); };

  SimplexOptions sopts;
  sopts.diameter_tol = options.tol;
  sopts.max_iterations = options.max_iterations;

  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  int used = 0;
  for (const auto& [sa, sb] : restart_seeds(options.restarts, options.seed)) {
    BlochState a = sa;
    if (options.gauge_fix) a.y = 0.0;
    SimplexResult r = nelder_mead(f, layout.encode(a, sb), sopts, project);
    ++used;
    if (r.value < best.value) best = std::move(r);
  }
  // Polish from the best vertex with a fresh, small simplex.
  sopts.initial_step = 0.01;
  SimplexResult polished = nelder_mead(f, best.x, sopts, project);
  if (polished.value <= best.value) best = std::move(polished);

  layout.project(best.x);
  MinimizeResult out;
  out.ansatz = layout.decode(best.x);
  out.ansatz.a = out.ansatz.a.clamped();
  out.ansatz.b = out.ansatz.b.clamped();
  out.residual_norm = functional.norm(out.ansatz);
  out.converged = best.converged;
  out.restarts_used = used;
  return out;
}

OrderParameters order_parameters(const ProductAnsatz& a) {
  const BlochState& b = a.kind == AnsatzKind::Uniform ? a.a : a.b;
  OrderParameters out;
  out.m = 0.5 * (std::hypot(a.a.x, a.a.y) + std::hypot(b.x, b.y));
  out.m_s = 0.5 * std::abs(a.a.z - b.z);
  return out;
}

LandauDirection parse_landau_direction(const std::string& s) {
  const std::string v = lower(s);
  if (v == "in-plane" || v == "inplane" || v == "xy") return LandauDirection::InPlane;
  if (v == "staggered-z" || v == "staggered" || v == "ms") return LandauDirection::StaggeredZ;
  throw std::invalid_argument("unknown Landau direction '" + s + "' (expected in-plane|staggered-z)");
}

LandauFit landau_expansion(const DissipativeModel& model, LandauDirection direction, const LandauOptions& options) {
  if (options.samples < 5) throw FitError("landau_expansion: need at least 5 samples");
  if (!(options.phi_max > 0.0 && options.phi_max < 1.0)) throw FitError("landau_expansion: phi_max must lie in (0, 1)");
  if (direction == LandauDirection::StaggeredZ && !model.lattice.bipartite) {
    throw std::invalid_argument("landau_expansion: staggered direction requires a bipartite lattice");
  }

  const BondFunctional functional(model);
  const double inf = std::numeric_limits<double>::infinity();
  SimplexOptions sopts;
  sopts.initial_step = 0.05;

  auto conditional_min = [&](double phi) {
    Objective f;
    std::vector<std::vector<double>> starts;
    if (direction == LandauDirection::InPlane) {
      f = [&, phi](std::span<const double> p) {
        const BlochState s{phi, 0.0, p[0]};
        return s.length() <= 1.0 ? functional.norm(ProductAnsatz::uniform(s)) : inf;
      };
      starts = {{0.0}, {0.2}, {-0.2}};
    } else {
      f = [&, phi](std::span<const double> p) {
        const BlochState a{p[0], 0.0, phi + p[2]};
        const BlochState b{p[1], 0.0, -phi + p[2]};
        if (a.length() > 1.0 || b.length() > 1.0) return inf;
        return functional.norm(ProductAnsatz::bipartite(a, b));
      };
      starts = {{0.0, 0.0, 0.0}, {0.1, 0.1, 0.0}, {0.1, -0.1, 0.0}};
    }
    double best = inf;
    for (auto& s : starts) best = std::min(best, nelder_mead(f, s, sopts).value);
    return best;
  };

  LandauFit fit;
  const auto n = static_cast<Eigen::Index>(options.samples);
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd values(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    const double phi = t * options.phi_max;
    const double v = conditional_min(phi);
    fit.phi_grid.emplace_back(phi, v);
    design(k, 0) = 1.0;
    design(k, 1) = t * t;
    design(k, 2) = t * t * t * t;
    values(k) = v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  const auto sv = svd.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) throw FitError("landau_expansion: ill-conditioned quartic fit");
  const Eigen::VectorXd coeff = design.colPivHouseholderQr().solve(values);
  const double s2 = options.phi_max * options.phi_max;
  fit.u0 = coeff(0);
  fit.u2 = coeff(1) / s2;
  fit.u4 = coeff(2) / (s2 * s2);
  fit.residual = std::sqrt((design * coeff - values).squaredNorm() / static_cast<double>(n));
  return fit;
}

OrderParameter parse_order_parameter(const std::string& s) {
  const std::string v = lower(s);
  if (v == "m") return OrderParameter::M;
  if (v == "ms" || v == "m_s") return OrderParameter::Ms;
  throw std::invalid_argument("unknown order parameter '" + s + "' (expected m|ms)");
}

namespace {

struct Sample {
  double lambda;
  double value;
};

std::vector<Sample> converged_samples(const std::vector<SweepRecord>& records, OrderParameter which) {
  std::vector<Sample> out;
  for (const auto& r : records) {
    if (!r.converged) continue;
    out.push_back({r.lambda, which == OrderParameter::M ? r.m : r.m_s});
  }
  std::sort(out.begin(), out.end(), [](const Sample& a, const Sample& b) { return a.lambda < b.lambda; });
  return out;
}

}  // namespace

std::pair<double, double> transition_bracket(const std::vector<SweepRecord>& records, OrderParameter which,
                                             double threshold) {
  const auto samples = converged_samples(records, which);
  // Longest run of ordered points; the transition borders it.
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < samples.size();) {
    if (samples[i].value < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < samples.size() && samples[j].value >= threshold) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len == 0) throw NoTransitionError("order parameter never exceeds threshold; no transition bracketed");
  const std::size_t first = best_start;
  const std::size_t last = best_start + best_len - 1;
  const bool has_left = first > 0;
  const bool has_right = last + 1 < samples.size();
  if (!has_left && !has_right) throw NoTransitionError("order parameter never drops below threshold; no transition bracketed");
  if (has_left && has_right) {
    const double gap_left = samples[first].lambda - samples[first - 1].lambda;
    const double gap_right = samples[last + 1].lambda - samples[last].lambda;
    if (gap_left < gap_right) return {samples[first].lambda, samples[first - 1].lambda};
    return {samples[last].lambda, samples[last + 1].lambda};
  }
  if (has_right) return {samples[last].lambda, samples[last + 1].lambda};
  return {samples[first].lambda, samples[first - 1].lambda};
}

CriticalFit fit_critical(const std::vector<SweepRecord>& records, OrderParameter which, const CriticalFitOptions& options) {
  if (!(options.window_lo > 0.0 && options.window_hi > options.window_lo)) {
    throw std::invalid_argument("fit_critical: invalid window");
  }
  const auto [ordered, disordered] = transition_bracket(records, which, options.threshold);
  CriticalFit fit;
  fit.lambda_c = 0.5 * (ordered + disordered);
  const double side = ordered < disordered ? -1.0 : 1.0;
  fit.lambda_lo = side < 0 ? fit.lambda_c - options.window_hi : fit.lambda_c + options.window_lo;
  fit.lambda_hi = side < 0 ? fit.lambda_c - options.window_lo : fit.lambda_c + options.window_hi;

  std::vector<double> xs, ys;
  for (const auto& s : converged_samples(records, which)) {
    const double delta = side * (s.lambda - fit.lambda_c);
    if (delta < options.window_lo || delta > options.window_hi || s.value < options.threshold) continue;
    xs.push_back(std::log(delta));
    ys.push_back(std::log(s.value));
  }
  if (xs.size() < options.min_points) {
    throw FitError("fit_critical: only " + std::to_string(xs.size()) + " ordered points in the fit window (need " +
                   std::to_string(options.min_points) + ")");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_critical: degenerate fit window");
  fit.beta = sxy / sxx;
  fit.amplitude = std::exp(my - fit.beta * mx);
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = xs.size();
  return fit;
}

}  // namespace dqm
