#include "roamp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <spdlog/spdlog.h>

#include "roamp/errors.hpp"

namespace roamp {

namespace {

constexpr double kPi = std::numbers::pi;

// int_lo^hi g(lambda) dlambda split at x, each half mapped through
// lambda = c - r cos(t) and integrated with Gauss-Legendre in t.
template <typename T, typename G>
T split_integral(double lo, double hi, double x, int n, G&& g) {
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  const double tx = std::acos(std::clamp((c - x) / r, -1.0, 1.0));
  const QuadratureRule& gl = gauss_legendre(n);
  T sum{};
  for (auto [t0, t1] : {std::pair{0.0, tx}, std::pair{tx, kPi}}) {
    const double half = 0.5 * (t1 - t0);
    if (half <= 0.0) continue;
    const double mid = 0.5 * (t1 + t0);
    for (std::size_t k = 0; k < gl.size(); ++k) {
      const double t = mid + half * gl.nodes[k];
      const double lambda = c - r * std::cos(t);
      sum += g(lambda) * (gl.weights[k] * half * r * std::sin(t));
    }
  }
  return sum;
}

void log_hilbert_zero_reading() {
  static std::once_flag once;
  std::call_once(once, [] {
    spdlog::debug("phi2(0) and nu2({{0}}) use H(0) read as the Hilbert transform of mu at 0");
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// SpectrumModel

SpectrumModel SpectrumModel::marchenko_pastur(double delta, SpectrumOptions opts) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("marchenko_pastur: delta must lie in (0, 1]");
  SpectrumModel m;
  m.kind_ = MarchenkoPastur{delta};
  m.opts_ = opts;
  m.delta_ = delta;
  m.lo_ = std::pow(1.0 - std::sqrt(delta), 2);
  m.hi_ = std::pow(1.0 + std::sqrt(delta), 2);
  m.finalize();
  return m;
}

SpectrumModel SpectrumModel::shifted_beta(double a, double b, double lo, double hi, double delta,
                                          SpectrumOptions opts) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("shifted_beta: delta must lie in (0, 1]");
  if (!(a > 0.0 && b > 0.0)) throw DomainError("shifted_beta: shape parameters must be positive");
  if (!(lo >= 0.0 && hi > lo)) throw DomainError("shifted_beta: need 0 <= lo < hi");
  SpectrumModel m;
  m.kind_ = ShiftedBeta{a, b, lo, hi};
  m.opts_ = opts;
  m.delta_ = delta;
  m.lo_ = lo;
  m.hi_ = hi;
  m.beta_norm_ = 1.0 / (std::beta(a, b) * (hi - lo));
  m.finalize();
  return m;
}

SpectrumModel SpectrumModel::tabulated(std::vector<double> grid, std::vector<double> density,
                                       double delta, SpectrumOptions opts) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("tabulated: delta must lie in (0, 1]");
  if (grid.empty() || grid.size() != density.size())
    throw DomainError("tabulated: grid and density must be non-empty and of equal length");
  if (grid.front() < 0.0) throw DomainError("tabulated: spectrum must lie on [0, inf)");
  if (grid.size() == 1) return point_mass(grid.front(), delta);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("tabulated: grid must be strictly increasing");
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(density[i] >= 0.0)) throw DomainError("tabulated: density must be non-negative");
    if (i > 0) mass += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  if (!(mass > 0.0)) throw DomainError("tabulated: density has zero mass");
  SpectrumModel m;
  m.opts_ = opts;
  m.delta_ = delta;
  m.lo_ = grid.front();
  m.hi_ = grid.back();
  m.tab_norm_ = 1.0 / mass;
  m.kind_ = Tabulated{std::move(grid), std::move(density)};
  m.finalize();
  return m;
}

SpectrumModel SpectrumModel::point_mass(double location, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("point_mass: delta must lie in (0, 1]");
  if (location < 0.0) throw DomainError("point_mass: location must be non-negative");
  SpectrumModel m;
  m.kind_ = Tabulated{{location}, {1.0}};
  m.delta_ = delta;
  m.lo_ = m.hi_ = location;
  m.atomic_ = true;
  m.nodes_ = {location};
  m.masses_ = {1.0};
  return m;
}

void SpectrumModel::finalize() {
  const QuadratureRule rule = cosine_mapped_rule(lo_, hi_, opts_.quadrature_nodes);
  nodes_ = rule.nodes;
  masses_.resize(rule.size());
  double total_mass = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    masses_[k] = rule.weights[k] * density(nodes_[k]);
    total_mass += masses_[k];
  }
  for (double& m : masses_) m /= total_mass;

  // CDF on a uniform grid in the cosine variable (trapezoid rule).
  const int n = opts_.cdf_points;
  const double r = 0.5 * (hi_ - lo_);
  const double c = 0.5 * (hi_ + lo_);
  cdf_t_.resize(n + 1);
  cdf_.assign(n + 1, 0.0);
  auto integrand = [&](double t) {
    const double lambda = c - r * std::cos(t);
    const double d = density(lambda);
    return std::isfinite(d) ? d * r * std::sin(t) : 0.0;
  };
  double prev = integrand(0.0);
  for (int i = 0; i <= n; ++i) {
    cdf_t_[i] = kPi * i / n;
    if (i == 0) continue;
    const double cur = integrand(cdf_t_[i]);
    cdf_[i] = cdf_[i - 1] + 0.5 * (prev + cur) * (kPi / n);
    prev = cur;
  }
  const double total = cdf_.back();
  for (double& v : cdf_) v /= total;
}

std::string SpectrumModel::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (atomic_) {
    os << "point_mass(" << lo_ << ";delta=" << delta_ << ")";
  } else if (const auto* mp = std::get_if<MarchenkoPastur>(&kind_)) {
    os << "mp(delta=" << mp->delta << ")";
  } else if (const auto* be = std::get_if<ShiftedBeta>(&kind_)) {
    os << "beta(" << be->a << "," << be->b << ",[" << be->lo << "," << be->hi
       << "];delta=" << delta_ << ")";
  } else {
    const auto& tab = std::get<Tabulated>(kind_);
    os << "tabulated(" << tab.grid.size() << " nodes,[" << lo_ << "," << hi_
       << "];delta=" << delta_ << ")";
  }
  return os.str();
}

double SpectrumModel::density(double lambda) const {
  if (atomic_ || lambda < lo_ || lambda > hi_) return 0.0;
  if (const auto* mp = std::get_if<MarchenkoPastur>(&kind_)) {
    if (lambda <= lo_ || lambda >= hi_) return 0.0;
    return std::sqrt((hi_ - lambda) * (lambda - lo_)) / (2.0 * kPi * mp->delta * lambda);
  }
  if (const auto* be = std::get_if<ShiftedBeta>(&kind_)) {
    const double x = (lambda - be->lo) / (be->hi - be->lo);
    if ((x <= 0.0 && be->a != 1.0) || (x >= 1.0 && be->b != 1.0)) {
      if ((x <= 0.0 && be->a > 1.0) || (x >= 1.0 && be->b > 1.0)) return 0.0;
    }
    return beta_norm_ * std::pow(x, be->a - 1.0) * std::pow(1.0 - x, be->b - 1.0);
  }
  const auto& tab = std::get<Tabulated>(kind_);
  auto it = std::upper_bound(tab.grid.begin(), tab.grid.end(), lambda);
  if (it == tab.grid.end()) return tab.density.back() * tab_norm_;
  const std::size_t i = static_cast<std::size_t>(it - tab.grid.begin());
  if (i == 0) return tab.density.front() * tab_norm_;
  const double x0 = tab.grid[i - 1];
  const double x1 = tab.grid[i];
  const double s = (lambda - x0) / (x1 - x0);
  return tab_norm_ * ((1.0 - s) * tab.density[i - 1] + s * tab.density[i]);
}

double SpectrumModel::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) sum += masses_[k] * f(nodes_[k]);
  return sum;
}

double SpectrumModel::integrate_tilde(const std::function<double(double)>& f) const {
  const double at_zero = delta_ < 1.0 ? (1.0 - delta_) * f(0.0) : 0.0;
  return delta_ * integrate(f) + at_zero;
}

complex SpectrumModel::split_stieltjes(complex z) const {
  const double x = z.real();
  const double dx = density(x);
  const complex integral = split_integral<complex>(lo_, hi_, x, opts_.split_nodes, [&](double lambda) {
    return z == lambda ? complex(0.0) : complex(density(lambda) - dx) / (z - lambda);
  });
  const complex log_term = dx == 0.0 ? complex(0.0) : dx * (std::log(z - lo_) - std::log(z - hi_));
  return integral + log_term;
}

complex SpectrumModel::stieltjes(complex z) const {
  if (atomic_) {
    if (z == complex(lo_, 0.0)) throw DomainError("stieltjes: z coincides with the point mass");
    return 1.0 / (z - lo_);
  }
  if (z.imag() == 0.0 && in_support(z.real()))
    throw DomainError("stieltjes: real z inside the support interval");
  if (const auto* mp = std::get_if<MarchenkoPastur>(&kind_)) {
    const complex root = std::sqrt(z - lo_) * std::sqrt(z - hi_);
    return 2.0 / (z - 1.0 + mp->delta + root);
  }
  if (z.real() > lo_ && z.real() < hi_) return split_stieltjes(z);
  complex sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) sum += masses_[k] / (z - nodes_[k]);
  return sum;
}

double SpectrumModel::hilbert(double x) const {
  if (atomic_) {
    if (x == lo_) throw DomainError("hilbert: x coincides with the point mass");
    return 1.0 / (kPi * (x - lo_));
  }
  if (!in_support(x)) return stieltjes(x) / kPi;
  if (const auto* mp = std::get_if<MarchenkoPastur>(&kind_)) {
    // Real part of S(x - i0) / pi; finite at x = 0 when delta = 1.
    if (x == 0.0) return 1.0 / (2.0 * kPi);
    return (1.0 - (1.0 - mp->delta) / x) / (2.0 * kPi * mp->delta);
  }
  const double dx = density(x);
  const double pv = split_integral<double>(lo_, hi_, x, opts_.split_nodes, [&](double lambda) {
    return lambda == x ? 0.0 : (density(lambda) - dx) / (x - lambda);
  });
  const double log_term = dx == 0.0 ? 0.0 : dx * std::log((x - lo_) / (hi_ - x));
  return (pv + log_term) / kPi;
}

complex SpectrumModel::c_transform(complex z) const {
  if (z == complex(0.0)) throw DomainError("c_transform: z = 0");
  const complex s = stieltjes(z);
  return delta_ * z * s * s + (1.0 - delta_) * s;
}

double SpectrumModel::quantile(double p) const {
  if (atomic_) return lo_;
  p = std::clamp(p, 0.0, 1.0);
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  double t;
  if (i == 0) {
    t = 0.0;
  } else if (i >= cdf_.size()) {
    t = kPi;
  } else {
    const double c0 = cdf_[i - 1];
    const double c1 = cdf_[i];
    const double s = c1 > c0 ? (p - c0) / (c1 - c0) : 0.0;
    t = cdf_t_[i - 1] + s * (cdf_t_[i] - cdf_t_[i - 1]);
  }
  return 0.5 * (lo_ + hi_) - 0.5 * (hi_ - lo_) * std::cos(t);
}

// ---------------------------------------------------------------------------
// ShrinkageSet

ShrinkageSet::ShrinkageSet(SpectrumModel spectrum, double theta)
    : spectrum_(std::move(spectrum)), theta_(theta) {
  if (!(theta >= 0.0)) throw DomainError("ShrinkageSet: theta must be >= 0");
  log_hilbert_zero_reading();
  const bool zero_is_atom = spectrum_.is_atomic() && spectrum_.support_min() == 0.0;
  hilbert_zero_ = zero_is_atom ? 0.0 : spectrum_.hilbert(0.0);
  const auto nodes = spectrum_.nodes();
  node_terms_.reserve(nodes.size());
  for (double lambda : nodes) {
    node_terms_.push_back(
        terms_from(lambda, spectrum_.is_atomic() ? 0.0 : spectrum_.density(lambda),
                   spectrum_.is_atomic() ? 0.0 : spectrum_.hilbert(lambda)));
  }
}

ShrinkageTerms ShrinkageSet::terms_from(double lambda, double density, double hilbert) const {
  if (lambda == 0.0) return zero_terms();
  const double d = delta();
  const double th2 = theta_ * theta_;
  const double pi = kPi;
  ShrinkageTerms t;
  t.lambda = lambda;
  t.density = density;
  t.hilbert = hilbert;
  const double a = 1.0 - th2 * ((1.0 - d) * pi * hilbert -
                                d * pi * pi * lambda * (density * density - hilbert * hilbert));
  const double b = pi * th2 * density * (1.0 - d + 2.0 * d * pi * lambda * hilbert);
  t.den = a * a + b * b;
  t.n1 = 1.0 + d * th2 * pi * pi * lambda * (hilbert * hilbert + density * density);
  t.n3 = theta_ * (1.0 - d + 2.0 * d * pi * lambda * hilbert);
  t.n2 = d * t.n1 + theta_ * (1.0 - d) * t.n3 / lambda;
  return t;
}

ShrinkageTerms ShrinkageSet::zero_terms() const {
  const double d = delta();
  const double th2 = theta_ * theta_;
  const double mu0 = spectrum_.is_atomic() ? 0.0 : spectrum_.density(0.0);
  ShrinkageTerms t;
  t.at_zero = true;
  t.lambda = 0.0;
  t.density = mu0;
  t.hilbert = hilbert_zero_;
  const double a = 1.0 - th2 * (1.0 - d) * kPi * hilbert_zero_;
  const double b = kPi * th2 * mu0 * (1.0 - d);
  t.den = a * a + b * b;
  t.n1 = 1.0;
  t.n3 = 0.0;
  // phi2(0) = delta / (1 - theta^2 (1 - delta) pi H(0)).
  t.n2 = t.den * d / a;
  return t;
}

ShrinkageTerms ShrinkageSet::terms(double lambda) const {
  if (lambda < 0.0) throw DomainError("shrinkage terms: lambda < 0");
  if (lambda == 0.0) return zero_terms();
  if (spectrum_.is_atomic()) {
    if (lambda == spectrum_.support_min()) throw DomainError("shrinkage terms at the point mass");
    return terms_from(lambda, 0.0, spectrum_.hilbert(lambda));
  }
  if (spectrum_.in_support(lambda))
    return terms_from(lambda, spectrum_.density(lambda), spectrum_.hilbert(lambda));
  return terms_from(lambda, 0.0, spectrum_.stieltjes(lambda) / kPi);
}

double ShrinkageSet::plemelj_denominator(double lambda) const { return terms(lambda).den; }

std::array<double, 3> ShrinkageSet::phi(double lambda) const {
  const ShrinkageTerms t = terms(lambda);
  return {t.phi1(), t.phi2(), t.phi3()};
}

// ---------------------------------------------------------------------------
// Atoms

std::vector<SpectralAtom> find_spectral_atoms(const ShrinkageSet& s, const AtomSearchOptions& opts) {
  const double theta = s.theta();
  if (theta < 0.0) throw DomainError("find_spectral_atoms: theta < 0");
  std::vector<SpectralAtom> atoms;
  if (theta == 0.0) return atoms;
  const SpectrumModel& mu = s.spectrum();
  const double d = mu.delta();
  const double th2 = theta * theta;
  auto g = [&](double x) { return 1.0 - th2 * mu.c_transform(x); };

  auto bisect = [&](double a, double b, double ga) {
    for (int it = 0; it < 400; ++it) {
      const double m = 0.5 * (a + b);
      if (b - a <= opts.tolerance * std::max(1.0, std::abs(m))) return m;
      const double gm = g(m);
      if (gm == 0.0) return m;
      if ((gm > 0.0) == (ga > 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    throw RootFindError("find_spectral_atoms: bisection did not reach tolerance", a, b);
  };

  auto make_atom = [&](double root, bool unverified) {
    const double h = opts.fd_relative_step * std::max(1.0, root);
    const double c_prime = (mu.c_transform(root + h) - mu.c_transform(root - h)) / (2.0 * h);
    const double sr = mu.stieltjes(root);
    // Above the support S > 0 and the condition is C' < 0; below it S < 0.
    if (!(sr / (-th2 * c_prime) > 0.0)) {
      throw InconsistencyError("find_spectral_atoms: C'(lambda*) = " + std::to_string(c_prime) +
                               " at lambda* = " + std::to_string(root) + " (atom mass would be negative)");
    }
    SpectralAtom atom;
    atom.location = root;
    atom.nu1_mass = sr / (-th2 * c_prime);
    atom.nu2_mass = (d * sr + (1.0 - d) / root) / (-th2 * c_prime);
    atom.nu3_mass = -(std::sqrt(d) / (1.0 + d)) / (2.0 * th2 * theta * std::sqrt(root) * c_prime);
    atom.unverified_branch = unverified;
    return atom;
  };

  auto scan = [&](double start, double end, bool unverified) {
    const int n = opts.scan_points;
    double x_prev = start + (end - start) / n;
    double g_prev = g(x_prev);
    // Both endpoints excluded: the lower scan ends at the support edge.
    for (int j = 2; j < n; ++j) {
      const double x = start + (end - start) * j / n;
      const double gx = g(x);
      if (gx == 0.0 || (gx > 0.0) != (g_prev > 0.0)) {
        const double root = gx == 0.0 ? x : bisect(x_prev, x, g_prev);
        atoms.push_back(make_atom(root, unverified));
        if (unverified) {
          spdlog::warn("find_spectral_atoms: root at {} below the support (unverified branch)", root);
        }
      }
      x_prev = x;
      g_prev = gx;
    }
  };

  const double hi = mu.support_max();
  scan(hi, hi + opts.margin_scale * (1.0 + th2), false);
  if (mu.support_min() > 0.0) {
    std::vector<SpectralAtom> upper = std::move(atoms);
    atoms.clear();
    scan(0.0, mu.support_min(), true);
    atoms.insert(atoms.end(), upper.begin(), upper.end());
  }
  return atoms;
}

// ---------------------------------------------------------------------------
// InducedMeasures

InducedMeasures::InducedMeasures(ShrinkageSet shrinkage, std::vector<SpectralAtom> atoms)
    : shrinkage_(std::move(shrinkage)), atoms_(std::move(atoms)) {
  for (const SpectralAtom& a : atoms_) {
    atom_terms_.push_back(shrinkage_.terms_from(
        a.location, 0.0, shrinkage_.spectrum().stieltjes(a.location) / kPi));
  }
  zero_terms_ = shrinkage_.zero_terms();
  const double d = delta();
  if (d < 1.0) {
    const double th2 = theta() * theta();
    nu2_zero_mass_ = (1.0 - d) / (1.0 - th2 * (1.0 - d) * kPi * shrinkage_.hilbert_at_zero());
  }
}

double InducedMeasures::nu1_density(double lambda) const {
  if (!spectrum().in_support(lambda) || spectrum().is_atomic()) return 0.0;
  return spectrum().density(lambda) * shrinkage_.terms(lambda).phi1();
}

double InducedMeasures::nu2_density(double lambda) const {
  if (!spectrum().in_support(lambda) || spectrum().is_atomic() || lambda == 0.0) return 0.0;
  return spectrum().density(lambda) * shrinkage_.terms(lambda).phi2();
}

double InducedMeasures::nu3_density(double sigma) const {
  const double lambda = sigma * sigma;
  if (sigma == 0.0 || !spectrum().in_support(lambda) || spectrum().is_atomic()) return 0.0;
  const double d = delta();
  const double sgn = sigma > 0.0 ? 1.0 : -1.0;
  return std::sqrt(d) / (1.0 + d) * sgn * spectrum().density(lambda) *
         shrinkage_.terms(lambda).phi3();
}

double InducedMeasures::integrate_terms(Measure m, const TermFn& h) const {
  const auto masses = spectrum().masses();
  const auto terms = shrinkage_.node_terms();
  const double d = delta();
  double sum = 0.0;
  switch (m) {
    case Measure::Mu:
      for (std::size_t k = 0; k < masses.size(); ++k) sum += masses[k] * h(terms[k]);
      return sum;
    case Measure::MuTilde:
      for (std::size_t k = 0; k < masses.size(); ++k) sum += masses[k] * h(terms[k]);
      sum *= d;
      if (d < 1.0) sum += (1.0 - d) * h(zero_terms_);
      return sum;
    case Measure::Nu1:
      for (std::size_t k = 0; k < masses.size(); ++k) sum += masses[k] * terms[k].phi1() * h(terms[k]);
      for (std::size_t i = 0; i < atoms_.size(); ++i) sum += atoms_[i].nu1_mass * h(atom_terms_[i]);
      return sum;
    case Measure::Nu2:
      for (std::size_t k = 0; k < masses.size(); ++k) sum += masses[k] * terms[k].phi2() * h(terms[k]);
      for (std::size_t i = 0; i < atoms_.size(); ++i) sum += atoms_[i].nu2_mass * h(atom_terms_[i]);
      if (d < 1.0) sum += nu2_zero_mass_ * h(zero_terms_);
      return sum;
    case Measure::Nu3:
      break;
  }
  throw DomainError("integrate_terms: nu3 is a measure in sigma; use integrate_nu3_sigma");
}

double InducedMeasures::integrate_nu3_sigma(const TermFn& h) const {
  const auto masses = spectrum().masses();
  const auto terms = shrinkage_.node_terms();
  const double d = delta();
  double sum = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) sum += masses[k] * terms[k].phi3() * h(terms[k]);
  sum *= std::sqrt(d) / (1.0 + d);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    sum += 2.0 * std::sqrt(atoms_[i].location) * atoms_[i].nu3_mass * h(atom_terms_[i]);
  }
  return sum;
}

double InducedMeasures::inner_product(Measure m, const std::function<double(double)>& f) const {
  if (m != Measure::Nu3) {
    return integrate_terms(m, [&](const ShrinkageTerms& t) { return f(t.lambda); });
  }
  const auto masses = spectrum().masses();
  const auto terms = shrinkage_.node_terms();
  const double d = delta();
  double sum = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double sigma = std::sqrt(terms[k].lambda);
    if (sigma == 0.0) continue;
    sum += masses[k] * terms[k].phi3() * (f(sigma) - f(-sigma)) / (2.0 * sigma);
  }
  sum *= std::sqrt(d) / (1.0 + d);
  for (const SpectralAtom& a : atoms_) {
    const double sigma = std::sqrt(a.location);
    sum += a.nu3_mass * (f(sigma) - f(-sigma));
  }
  return sum;
}

ShrinkageTerms InducedMeasures::empirical_terms(double lambda) const {
  const SpectrumModel& mu = spectrum();
  if (lambda < 0.0) lambda = 0.0;
  if (lambda == 0.0) return zero_terms_;
  if (mu.in_support(lambda) && !mu.is_atomic()) return shrinkage_.terms(lambda);
  const double edge = lambda > mu.support_max() ? mu.support_max() : mu.support_min();
  const double edge_distance = std::abs(lambda - edge);
  for (const SpectralAtom& a : atoms_) {
    if (std::abs(lambda - a.location) < edge_distance) return shrinkage_.terms(lambda);
  }
  if (mu.is_atomic()) return shrinkage_.terms(lambda);
  return shrinkage_.terms(edge);
}

InducedMeasures build_induced_measures(const ShrinkageSet& s, const AtomSearchOptions& opts) {
  return InducedMeasures(s, find_spectral_atoms(s, opts));
}

}  // namespace roamp
