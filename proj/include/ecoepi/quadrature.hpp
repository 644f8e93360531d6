#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ecoepi/errors.hpp"

namespace ecoepi {

/// An integrand tabulated on a uniform grid t0 + i*step, i = 0..size-1.
struct SampledSeries {
  double t0 = 0.0;
  double step = 1.0;
  std::vector<double> values;

  double t_end() const { return t0 + step * static_cast<double>(values.size() - 1); }

  static SampledSeries tabulate(const std::function<double(double)>& phi, double t0, double span,
                                std::size_t intervals) {
    if (intervals < 2 || !(span > 0.0)) throw std::invalid_argument("tabulate needs span > 0 and >= 2 intervals");
    SampledSeries s{t0, span / static_cast<double>(intervals), {}};
    s.values.resize(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) s.values[i] = phi(t0 + s.step * static_cast<double>(i));
    return s;
  }
};

namespace detail {

// Integral over nodes [j, j + n] with composite Simpson; an odd count
// finishes with the 3/8 rule on the last three intervals.
inline double simpson_nodes(const std::vector<double>& v, std::size_t j, std::size_t n, double h) {
  if (n == 1) return 0.5 * h * (v[j] + v[j + 1]);
  double sum = 0.0;
  std::size_t even = n % 2 == 0 ? n : n - 3;
  for (std::size_t p = 0; p < even; p += 2) sum += v[j + p] + 4.0 * v[j + p + 1] + v[j + p + 2];
  sum *= h / 3.0;
  if (even != n) {
    const std::size_t k = j + even;
    sum += 3.0 * h / 8.0 * (v[k] + 3.0 * v[k + 1] + 3.0 * v[k + 2] + v[k + 3]);
  }
  return sum;
}

inline std::size_t grid_index(const SampledSeries& s, double t, const char* what) {
  const double pos = (t - s.t0) / s.step;
  const double r = std::round(pos);
  if (std::abs(pos - r) > 1e-6) throw std::invalid_argument(std::string(what) + " must lie on the sample grid");
  if (r < 0.0 || r > static_cast<double>(s.values.size() - 1)) throw OutOfSpan(std::string(what) + " outside sampled span");
  return static_cast<std::size_t>(r);
}

}  // namespace detail

/// Integral of the sampled integrand over [t, t + lambda].
inline double window_integral(const SampledSeries& phi, double t, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("window length must be > 0");
  if (t < phi.t0 - 1e-9 * phi.step || t + lambda > phi.t_end() + 1e-9 * phi.step)
    throw OutOfSpan("window leaves the sampled span");
  const std::size_t j = detail::grid_index(phi, t, "window start");
  const std::size_t e = detail::grid_index(phi, t + lambda, "window end");
  if (e <= j) throw std::invalid_argument("window shorter than one sample step");
  return detail::simpson_nodes(phi.values, j, e - j, phi.step);
}

/// Extremes of the windowed integral over every window start on the grid.
struct WindowExtrema {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t windows = 0;
};

/// Sweeps all windows of `n` intervals (n even) in O(size) with parity
/// prefix sums over Simpson panels.
inline WindowExtrema window_extrema(const SampledSeries& phi, double lambda) {
  const double nd = lambda / phi.step;
  const auto n = static_cast<std::size_t>(std::llround(nd));
  if (std::abs(nd - static_cast<double>(n)) > 1e-6 || n < 2 || n % 2 != 0)
    throw std::invalid_argument("window length must be an even multiple of the sample step");
  const auto& v = phi.values;
  if (v.size() < n + 1) throw OutOfSpan("sampled span shorter than one window");
  const std::size_t panels = v.size() - 2;
  // pre[i + 2] = panel(i) + pre[i]
  std::vector<double> pre(panels + 2, 0.0);
  for (std::size_t i = 0; i < panels; ++i)
    pre[i + 2] = pre[i] + (v[i] + 4.0 * v[i + 1] + v[i + 2]) * phi.step / 3.0;
  WindowExtrema w;
  for (std::size_t j = 0; j + n < v.size(); ++j) {
    const double val = pre[j + n] - pre[j];
    w.min = std::min(w.min, val);
    w.max = std::max(w.max, val);
    ++w.windows;
  }
  return w;
}

/// Mean of phi over [t0, t0 + span] by composite Simpson.
inline double period_mean(const std::function<double(double)>& phi, double t0, double span,
                          std::size_t intervals = 2048) {
  auto s = SampledSeries::tabulate(phi, t0, span, intervals + intervals % 2);
  return detail::simpson_nodes(s.values, 0, s.values.size() - 1, s.step) / span;
}

}  // namespace ecoepi
