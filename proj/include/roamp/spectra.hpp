#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "roamp/quadrature.hpp"

namespace roamp {

using complex = std::complex<double>;

struct MarchenkoPastur {
  double delta;
};

// Beta(a, b) law rescaled from [0, 1] to [lo, hi].
struct ShiftedBeta {
  double a;
  double b;
  double lo;
  double hi;
};

// Piecewise-linear density on a grid. A single grid node is a point mass.
struct Tabulated {
  std::vector<double> grid;
  std::vector<double> density;
};

using SpectrumKind = std::variant<MarchenkoPastur, ShiftedBeta, Tabulated>;

struct SpectrumOptions {
  int quadrature_nodes = 2000;
  // Nodes per half-interval for principal-value and near-axis integrals.
  int split_nodes = 256;
  int cdf_points = 8192;
};

/// Limiting spectral law mu of W W^T together with the aspect ratio delta.
/// The law of W^T W is implied: delta * mu + (1 - delta) * delta_0.
///
/// Immutable after construction; all members are safe to call concurrently.
class SpectrumModel {
 public:
  /// Marchenko-Pastur law for W with i.i.d. N(0, 1/N) entries, M/N = delta.
  static SpectrumModel marchenko_pastur(double delta, SpectrumOptions opts = {});
  static SpectrumModel shifted_beta(double a, double b, double lo, double hi, double delta,
                                    SpectrumOptions opts = {});
  /// Density renormalized to unit mass by the trapezoid rule.
  static SpectrumModel tabulated(std::vector<double> grid, std::vector<double> density,
                                 double delta, SpectrumOptions opts = {});
  static SpectrumModel point_mass(double location, double delta);

  const SpectrumKind& kind() const { return kind_; }
  double delta() const { return delta_; }
  double support_min() const { return lo_; }
  double support_max() const { return hi_; }
  bool is_atomic() const { return atomic_; }
  bool in_support(double x) const { return x >= lo_ && x <= hi_; }
  std::string describe() const;

  double density(double lambda) const;

  /// Discretization of mu: nodes and masses (quadrature weight times density).
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> masses() const { return masses_; }

  /// <f>_mu by quadrature.
  double integrate(const std::function<double(double)>& f) const;
  /// <f>_{mu tilde} = delta <f>_mu + (1 - delta) f(0).
  double integrate_tilde(const std::function<double(double)>& f) const;

  /// S(z) = int (z - lambda)^{-1} dmu(lambda). Throws DomainError for real z
  /// inside the support interval.
  complex stieltjes(complex z) const;
  double stieltjes(double x) const { return stieltjes(complex(x, 0.0)).real(); }

  /// (1/pi) P.V. int mu(lambda) / (x - lambda) dlambda; equals S(x)/pi off
  /// the support.
  double hilbert(double x) const;

  /// C(z) = z S(z) (delta S(z) + (1 - delta)/z).
  complex c_transform(complex z) const;
  double c_transform(double x) const { return c_transform(complex(x, 0.0)).real(); }

  /// Inverse CDF, p in [0, 1].
  double quantile(double p) const;

 private:
  SpectrumModel() = default;
  void finalize();
  complex split_stieltjes(complex z) const;

  SpectrumKind kind_;
  SpectrumOptions opts_;
  double delta_ = 1.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool atomic_ = false;
  double beta_norm_ = 1.0;
  double tab_norm_ = 1.0;
  std::vector<double> nodes_;
  std::vector<double> masses_;
  std::vector<double> cdf_t_;
  std::vector<double> cdf_;
};

/// Plemelj-limit numerators and denominator at one eigenvalue location. The
/// shrinkage functions are phi_i = n_i / den; keeping the pieces separate
/// lets the matrix denoisers stay finite at outlier atoms where den -> 0.
struct ShrinkageTerms {
  double lambda = 0.0;
  double density = 0.0;
  double hilbert = 0.0;
  double n1 = 1.0;
  double n2 = 1.0;
  double n3 = 0.0;
  double den = 1.0;
  bool at_zero = false;

  double phi1() const { return n1 / den; }
  double phi2() const { return n2 / den; }
  double phi3() const { return n3 / den; }
};

/// The three shrinkage functions for a given SNR theta.
class ShrinkageSet {
 public:
  ShrinkageSet(SpectrumModel spectrum, double theta);

  const SpectrumModel& spectrum() const { return spectrum_; }
  double theta() const { return theta_; }
  double delta() const { return spectrum_.delta(); }
  /// The Hilbert transform at the origin that enters phi2(0) and nu2({0}).
  double hilbert_at_zero() const { return hilbert_zero_; }

  /// Terms at lambda >= 0. Inside the support the density and Hilbert
  /// transform are used; outside, density 0 and H = S/pi (the analytic
  /// continuation used at outlier atoms).
  ShrinkageTerms terms(double lambda) const;
  ShrinkageTerms terms_from(double lambda, double density, double hilbert) const;
  ShrinkageTerms zero_terms() const;

  /// lim_{eps->0+} |1 - theta^2 C(lambda - i eps)|^2 written through mu and H.
  double plemelj_denominator(double lambda) const;
  /// (phi1, phi2, phi3) at lambda in supp(mu) or lambda = 0.
  std::array<double, 3> phi(double lambda) const;

  /// Cached terms at the quadrature nodes of the spectrum.
  std::span<const ShrinkageTerms> node_terms() const { return node_terms_; }

 private:
  SpectrumModel spectrum_;
  double theta_;
  double hilbert_zero_ = 0.0;
  std::vector<ShrinkageTerms> node_terms_;
};

struct AtomSearchOptions {
  // Scan (lambda_max, lambda_max + margin_scale (1 + theta^2)].
  double margin_scale = 10.0;
  int scan_points = 10000;
  double tolerance = 1e-12;
  double fd_relative_step = 1e-6;
};

struct SpectralAtom {
  double location = 0.0;
  double nu1_mass = 0.0;
  double nu2_mass = 0.0;
  // Mass of nu3 at +sqrt(location); the mass at -sqrt(location) is its negative.
  double nu3_mass = 0.0;
  // Root found below the support; masses follow the same formulas but this
  // branch has no established interpretation.
  bool unverified_branch = false;
};

/// Roots of 1 - theta^2 C(lambda) = 0 off the support, with point masses.
std::vector<SpectralAtom> find_spectral_atoms(const ShrinkageSet& s,
                                              const AtomSearchOptions& opts = {});

enum class Measure { Mu, MuTilde, Nu1, Nu2, Nu3 };

using TermFn = std::function<double(const ShrinkageTerms&)>;

/// Limits nu1, nu2, nu3 of the signal-weighted empirical spectral measures.
class InducedMeasures {
 public:
  InducedMeasures(ShrinkageSet shrinkage, std::vector<SpectralAtom> atoms);

  const ShrinkageSet& shrinkage() const { return shrinkage_; }
  const SpectrumModel& spectrum() const { return shrinkage_.spectrum(); }
  double theta() const { return shrinkage_.theta(); }
  double delta() const { return shrinkage_.delta(); }
  std::span<const SpectralAtom> atoms() const { return atoms_; }
  double nu2_zero_mass() const { return nu2_zero_mass_; }

  double nu1_density(double lambda) const;
  double nu2_density(double lambda) const;
  /// Signed density of nu3 in sigma.
  double nu3_density(double sigma) const;

  /// <f> for any of the five measures. For Nu3, f is a function of sigma.
  double inner_product(Measure m, const std::function<double(double)>& f) const;
  /// <h> over a lambda-measure, with h reading the shrinkage terms.
  double integrate_terms(Measure m, const TermFn& h) const;
  /// <sigma h(sigma^2)>_{nu3}.
  double integrate_nu3_sigma(const TermFn& h) const;

  /// Terms used when a matrix denoiser is evaluated at an empirical
  /// eigenvalue: inside the support as usual; outside, clamped to the
  /// nearest edge unless the point is closer to a detected atom.
  ShrinkageTerms empirical_terms(double lambda) const;

 private:
  ShrinkageSet shrinkage_;
  std::vector<SpectralAtom> atoms_;
  std::vector<ShrinkageTerms> atom_terms_;
  ShrinkageTerms zero_terms_;
  double nu2_zero_mass_ = 0.0;
};

InducedMeasures build_induced_measures(const ShrinkageSet& s, const AtomSearchOptions& opts = {});

}  // namespace roamp
