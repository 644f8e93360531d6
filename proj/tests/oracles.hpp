#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library: closed forms, bisection and brute-force quadrature only.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace oracle {

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::invalid_argument("bisect: no sign change");
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Solution of y' = (r - k y) y with y(0) = y0.
inline double logistic(double r, double k, double y0, double t) {
  const double K = r / k;
  return K / (1.0 + (K / y0 - 1.0) * std::exp(-r * t));
}

/// Brute-force midpoint rule with n cells.
inline double midpoint(const std::function<double(double)>& f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

// Shared example coefficients.
inline double beta(double beta0, double t) { return beta0 * (1.0 + 0.7 * std::cos(2.0 * std::numbers::pi * t)); }
inline double eta(double t) { return 0.7 * (1.0 + 0.7 * std::cos(std::numbers::pi + 2.0 * std::numbers::pi * t)); }
constexpr double c = 0.1;

// Logistic prey and predator of Examples 1-3.
constexpr double s_star = 0.7 / 0.6;
constexpr double y_star_growth = 0.2 / 0.6;

// Example 2: equilibrium predator of the upper family, x = Lambda/mu.
inline double ex2_zhat0() {
  const double b = 0.2, mu = 0.6, a = 0.9, gamma = 0.1, Lambda = 0.7, r = 0.6;
  return (b * mu + a * gamma * Lambda) / (mu * r);
}
inline double ex2_x1() { return (0.7 - 0.9 * ex2_zhat0()) / 0.6; }
inline double ex2_z1() { return (0.2 + 0.1 * 0.9 * ex2_x1()) / 0.6; }

// Example 3: saturating response S/(2 + S + I).
inline double ex3_z2() {
  return bisect([](double z) { return 0.2 - 0.6 * z + 0.8 * 0.9 * s_star / (2.0 + s_star); }, 0.0, 10.0);
}
inline double ex3_x1() {
  const double z2 = ex3_z2();
  return bisect([z2](double x) { return (0.7 - 0.6 * x) - 0.9 * z2 / (2.0 + x); }, 1e-9, s_star);
}

// Example 4: ratio-dependent response S/(2P + S + I), G = 3 - 0.6 S.
inline double ex4_z2_closed() {
  const double Lambda = 3.0, mu = 0.6, r = 0.6, m = 2.0, b = 0.2, gamma = 0.8, a = 0.9;
  const double A = -Lambda * r + b * m * mu;
  const double B = b + gamma * a;
  return (A + std::sqrt(A * A + 4.0 * Lambda * r * m * mu * B)) / (2.0 * r * m * mu);
}
inline double ex4_z2_bisect() {
  const double x = 5.0;
  return bisect([x](double z) { return 0.2 - 0.6 * z + 0.8 * 0.9 * x / (2.0 * z + x); }, 1e-9, 20.0);
}
inline double ex4_x1() { return (3.0 - 0.9 * ex4_z2_closed()) / 0.6; }
inline double ex4_z1() {
  const double x = ex4_x1();
  return bisect([x](double z) { return 0.2 - 0.6 * z + 0.8 * 0.9 * x / (2.0 * z + x); }, 1e-9, 20.0);
}

/// Windowed integral over one period of beta s - eta g - c for constant s and
/// g(s, 0, y) = y, by brute-force quadrature.
inline double constant_threshold(double beta0, double s, double y, double t0 = 0.0) {
  return midpoint([&](double t) { return beta(beta0, t) * s - eta(t) * y - c; }, t0, t0 + 1.0);
}

}  // namespace oracle
