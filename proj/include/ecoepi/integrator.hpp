#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ecoepi/errors.hpp"
#include "ecoepi/model.hpp"

namespace ecoepi {

struct IntegrationControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;  // 0 selects a starting step automatically
  double max_step = 1.0;
  /// Project small negative undershoots to zero (population models).
  bool nonnegative = true;
  std::size_t max_steps = 50'000'000;
};

namespace dopri5 {

// Dormand & Prince (1980) RK5(4)7FM tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Error coefficients: 5th-order weights minus embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output (Hairer, Norsett & Wanner, dopri5 contd5).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dopri5

template <std::size_t N>
class Trajectory;

template <std::size_t N>
Trajectory<N> integrate(const Field<N>& f, const State<N>& y0, double t0, double t1,
                        const IntegrationControl& ctl = {});

/// Accepted-step knots of an integration, with the data of the 4th-order
/// continuous extension on each step.
template <std::size_t N>
class Trajectory {
 public:
  static constexpr std::size_t dimension = N;

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  std::size_t knot_count() const { return times_.size(); }
  std::span<const double> times() const { return times_; }
  std::span<const State<N>> states() const { return states_; }
  const State<N>& back() const { return states_.back(); }

  State<N> sample(double t) const {
    if (times_.empty() || !(t >= times_.front() && t <= times_.back()))
      throw OutOfSpan("trajectory sample outside [t0, t1]");
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    std::size_t j = static_cast<std::size_t>(it - times_.begin());
    if (it != times_.end() && *it == t) return states_[j];
    // t lies inside step j-1 = [times_[j-1], times_[j]].
    const std::size_t s = j - 1;
    const double h = times_[j] - times_[s];
    const double th = (t - times_[s]) / h;
    const double th1 = 1.0 - th;
    const auto& r = cont_[s];
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    return y;
  }

  /// Write `t,<names...>` rows at a fixed step (plus the final time), 17 significant digits.
  void write_csv(std::ostream& os, std::span<const std::string> names, double step) const {
    os << "t";
    for (std::size_t i = 0; i < N; ++i) os << ',' << (i < names.size() ? names[i] : "y" + std::to_string(i));
    os << '\n';
    const double t0 = t_begin(), t1 = t_end();
    const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
    auto row = [&](double t) {
      const State<N> y = sample(t);
      os << format_double(t);
      for (double v : y) os << ',' << format_double(v);
      os << '\n';
    };
    for (std::size_t k = 0; k <= count; ++k) row(std::min(t0 + static_cast<double>(k) * step, t1));
    if (t0 + static_cast<double>(count) * step < t1 - 1e-12 * (1.0 + std::abs(t1))) row(t1);
  }

  static std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  std::size_t rejected_steps = 0;

 private:
  template <std::size_t M>
  friend Trajectory<M> integrate(const Field<M>&, const State<M>&, double, double,
                                 const IntegrationControl&);

  std::vector<double> times_;
  std::vector<State<N>> states_;
  std::vector<std::array<State<N>, 5>> cont_;
};

namespace detail {

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const IntegrationControl& ctl) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

template <std::size_t N>
double initial_step(const Field<N>& f, double t0, const State<N>& y0, const State<N>& k1,
                    double span, const IntegrationControl& ctl) {
  // Hairer, Norsett & Wanner, Solving ODEs I, II.4.
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (k1[i] / sc) * (k1[i] / sc);
  }
  d0 = std::sqrt(d0 / N);
  d1 = std::sqrt(d1 / N);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min({h0, span, ctl.max_step});
  State<N> y1{};
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * k1[i];
  const State<N> k2 = f(t0 + h0, y1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y0[i]);
    const double q = (k2[i] - k1[i]) / sc;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / N) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span, ctl.max_step});
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) over [t0, t1].
///
/// With `ctl.nonnegative`, a component that undershoots zero by at most
/// abs_tol is projected to 0; a deeper undershoot rejects the step, and
/// NegativityViolation is thrown once the step size cannot shrink further.
template <std::size_t N>
Trajectory<N> integrate(const Field<N>& f, const State<N>& y0, double t0, double t1,
                        const IntegrationControl& ctl) {
  using namespace dopri5;
  if (!(t1 > t0)) throw std::invalid_argument("integrate requires t1 > t0");
  if (!(ctl.rel_tol > 0.0) || !(ctl.abs_tol > 0.0) || !(ctl.max_step > 0.0))
    throw std::invalid_argument("integration tolerances and max_step must be > 0");

  Trajectory<N> tr;
  State<N> y = y0;
  if (ctl.nonnegative)
    for (std::size_t i = 0; i < N; ++i) {
      if (y[i] < -ctl.abs_tol) throw NegativityViolation("negative initial state");
      if (y[i] < 0.0) y[i] = 0.0;
    }
  double t = t0;
  tr.times_.push_back(t);
  tr.states_.push_back(y);

  State<N> k1 = f(t, y);
  const double span = t1 - t0;
  double h = ctl.initial_step > 0.0 ? std::min({ctl.initial_step, span, ctl.max_step})
                                    : detail::initial_step(f, t0, y, k1, span, ctl);
  const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t0), std::abs(t1));

  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
  bool last_rejected = false;
  bool negativity_rejection = false;
  std::size_t steps = 0;

  State<N> k2, k3, k4, k5, k6, k7, ys, y_new, err;
  while (t < t1) {
    if (++steps > ctl.max_steps) throw StepSizeUnderflow("maximum number of steps exceeded");
    if (h < h_min) {
      if (negativity_rejection)
        throw NegativityViolation("state component driven below -abs_tol at t=" + std::to_string(t));
      throw StepSizeUnderflow("step size underflow at t=" + std::to_string(t));
    }
    if (t + 1.01 * h >= t1) h = t1 - t;

    for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, ys);
    for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, ys);
    for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, ys);
    for (std::size_t i = 0; i < N; ++i)
      ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * h, ys);
    for (std::size_t i = 0; i < N; ++i)
      ys[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + h, ys);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    const double t_new = (h == t1 - t) ? t1 : t + h;
    k7 = f(t_new, y_new);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    // Error per unit step for h < 1: global error then scales faster than
    // linearly in the tolerance, and the per-step bound still holds.
    const bool per_unit = h < 1.0;
    double en = detail::error_norm(err, y, y_new, ctl) / (per_unit ? h : 1.0);
    if (!std::isfinite(en)) en = 1e10;
    const double order_exp = per_unit ? -0.25 : -0.2;

    bool negative = false;
    if (ctl.nonnegative)
      for (std::size_t i = 0; i < N; ++i)
        if (y_new[i] < -ctl.abs_tol) negative = true;

    if (en > 1.0 || negative) {
      ++tr.rejected_steps;
      negativity_rejection = negative && en <= 1.0;
      const double fac = negative && en <= 1.0 ? 0.5
                                               : std::max(fac_min, safety * std::pow(en, order_exp));
      h *= fac;
      last_rejected = true;
      continue;
    }
    negativity_rejection = false;

    bool projected = false;
    if (ctl.nonnegative)
      for (std::size_t i = 0; i < N; ++i)
        if (y_new[i] < 0.0) {
          y_new[i] = 0.0;
          projected = true;
        }
    if (projected) {
      k7 = f(t_new, y_new);
      // A field pointing out of the orthant at a zero component is a modeling fault.
      for (std::size_t i = 0; i < N; ++i)
        if (y_new[i] == 0.0 && k7[i] < -ctl.abs_tol)
          throw NegativityViolation("field points below zero at t=" + std::to_string(t_new));
    }

    std::array<State<N>, 5> rc;
    for (std::size_t i = 0; i < N; ++i) {
      const double dy = y_new[i] - y[i];
      const double bspl = h * k1[i] - dy;
      rc[0][i] = y[i];
      rc[1][i] = dy;
      rc[2][i] = bspl;
      rc[3][i] = dy - h * k7[i] - bspl;
      rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    tr.cont_.push_back(rc);
    tr.times_.push_back(t_new);
    tr.states_.push_back(y_new);

    t = t_new;
    y = y_new;
    k1 = k7;

    double fac = en > 0.0 ? safety * std::pow(en, order_exp) : fac_max;
    fac = std::clamp(fac, fac_min, fac_max);
    if (last_rejected) fac = std::min(fac, 1.0);
    h = std::min(h * fac, ctl.max_step);
    last_rejected = false;
  }
  return tr;
}

/// Scalar convenience wrapper.
inline Trajectory<1> integrate_scalar(const std::function<double(double, double)>& f, double y0,
                                      double t0, double t1, const IntegrationControl& ctl = {}) {
  const Field<1> field = [&f](double t, const State<1>& y) { return State<1>{f(t, y[0])}; };
  return integrate<1>(field, State<1>{y0}, t0, t1, ctl);
}

}  // namespace ecoepi
