#pragma once

// Reference computations written independently of the library: plain
// adaptive Simpson / trapezoid rules and the shrinkage and denoiser formulas
// transcribed term by term.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

template <typename T>
T simpson_step(const std::function<T(double)>& f, double a, double b, T fa, T fm, T fb, T whole,
               double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const T diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename T = double>
T adaptive_simpson(const std::function<T(double)>& f, double a, double b, double tol = 1e-10,
                   int depth = 50) {
  const T fa = f(a);
  const T fb = f(b);
  const T fm = f(0.5 * (a + b));
  const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

// E[g(Z)] for Z ~ N(0, 1) by the trapezoid rule on [-12, 12].
inline double gaussian_expectation(const std::function<double(double)>& g, int n) {
  const double c = 1.0 / std::sqrt(2.0 * pi);
  return trapezoid([&](double z) { return g(z) * c * std::exp(-0.5 * z * z); }, -12.0, 12.0, n);
}

// Integrals over [lo, hi] of a density with square-root or power-law edges,
// after the substitution lambda = lo + (hi - lo) sin^2(s), which removes the
// edge singularities for exponents >= 1/2.
inline double edge_integral(const std::function<double(double)>& f, double lo, double hi,
                            double tol = 1e-11) {
  const double w = hi - lo;
  return adaptive_simpson<double>(
      [&](double s) {
        const double lambda = lo + w * std::sin(s) * std::sin(s);
        return f(lambda) * 2.0 * w * std::sin(s) * std::cos(s);
      },
      0.0, 0.5 * pi, tol);
}

// (1/pi) PV int rho(l) / (x - l) dl by symmetric excision of (x - h, x + h),
// the excised piece approximated by -2 h rho'(x). Each side is integrated in
// s = log|x - l|, which turns rho(l) / (x - l) dl into rho(x -+ e^s) ds.
inline double hilbert_excision(const std::function<double(double)>& rho, double lo, double hi, double x,
                               double h = 1e-6) {
  const double left = adaptive_simpson<double>([&](double s) { return rho(x - std::exp(s)); },
                                               std::log(h), std::log(x - lo), 1e-11, 40);
  const double right = adaptive_simpson<double>([&](double s) { return rho(x + std::exp(s)); },
                                                std::log(h), std::log(hi - x), 1e-11, 40);
  const double d = 1e-4;
  const double slope = (rho(x + d) - rho(x - d)) / (2.0 * d);
  return (left - right - 2.0 * h * slope) / pi;
}

struct Phi {
  double phi1;
  double phi2;
  double phi3;
  double den;
};

// The shrinkage functions at lambda > 0 from the density value and the
// Hilbert transform, with the Plemelj-limit denominator expanded.
inline Phi shrinkage(double lambda, double mu, double H, double theta, double delta) {
  const double t2 = theta * theta;
  const double re = 1.0 - t2 * ((1.0 - delta) * pi * H - delta * pi * pi * lambda * (mu * mu - H * H));
  const double im = pi * t2 * mu * (1.0 - delta + 2.0 * delta * pi * lambda * H);
  const double den = re * re + im * im;
  Phi p;
  p.den = den;
  p.phi1 = (1.0 + delta * t2 * pi * pi * lambda * (H * H + mu * mu)) / den;
  p.phi3 = theta * (1.0 - delta + 2.0 * delta * pi * lambda * H) / den;
  p.phi2 = delta * p.phi1 + theta * (1.0 - delta) / lambda * p.phi3;
  return p;
}

struct Denoisers {
  double D, P, P_tilde, Q, Q_tilde;
};

inline Denoisers denoisers(double lambda, const Phi& p, double rho1, double rho2, double delta) {
  Denoisers d;
  d.D = (rho1 * p.phi1 + 1.0) * (rho2 * p.phi2 + delta) * lambda - rho1 * rho2 * p.phi3 * p.phi3;
  d.P = lambda * (rho2 * p.phi2 + delta) / d.D;
  d.P_tilde = std::sqrt(delta) * rho2 * p.phi3 / d.D;
  d.Q = delta * lambda * (rho1 * p.phi1 + 1.0) / d.D;
  d.Q_tilde = std::sqrt(delta) * rho1 * p.phi3 / d.D;
  return d;
}

inline double mp_density(double lambda, double delta) {
  const double a = std::pow(1.0 - std::sqrt(delta), 2);
  const double b = std::pow(1.0 + std::sqrt(delta), 2);
  if (lambda <= a || lambda >= b) return 0.0;
  return std::sqrt((b - lambda) * (lambda - a)) / (2.0 * pi * delta * lambda);
}

inline double beta_density(double lambda, double a, double b, double lo, double hi) {
  if (lambda <= lo || lambda >= hi) return 0.0;
  const double x = (lambda - lo) / (hi - lo);
  return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0) / (std::beta(a, b) * (hi - lo));
}

}  // namespace oracle
