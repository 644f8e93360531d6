#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ecoepi/errors.hpp"
#include "ecoepi/integrator.hpp"
#include "ecoepi/model.hpp"

namespace ecoepi {

struct ConvergenceControl {
  double burn_in = 500.0;          // time units
  double burn_in_periods = 200.0;  // with a period, burn-in is max(burn_in, periods * period)
  double match_tol = 1e-7;
  double max_horizon = 5000.0;
  std::size_t probe_count = 3;
  std::size_t samples_per_period = 2048;
  double tail_length = 50.0;  // window sampled for quasi-stationary tails
  IntegrationControl integration{1e-10, 1e-12, 0.0, 0.1, true};

  double effective_burn_in(std::optional<double> period) const {
    if (!period) return burn_in;
    const double b = std::max(burn_in, burn_in_periods * *period);
    return std::ceil(b / *period - 1e-9) * *period;
  }
};

enum class OrbitKind { Equilibrium, PeriodicOrbit, QuasiStationary };

inline const char* orbit_kind_name(OrbitKind k) {
  switch (k) {
    case OrbitKind::Equilibrium: return "equilibrium";
    case OrbitKind::PeriodicOrbit: return "periodic";
    default: return "quasi_stationary";
  }
}

struct OrbitDiagnostics {
  double residual = 0.0;          // |rhs| at an equilibrium, sup over one period
  double match_error = 0.0;       // last |y(t + w) - y(t)| or tail derivative norm
  double contraction_rate = 0.0;  // decay rate of the match error per unit time
  double converged_at = 0.0;      // time at which the match tolerance was met
};

/// A computed attracting solution, evaluable at any time in its domain.
/// Periodic and quasi-stationary orbits store samples and derivatives on a
/// uniform grid and interpolate with cubic Hermite polynomials.
template <std::size_t N>
struct AttractorOrbit {
  OrbitKind kind = OrbitKind::Equilibrium;
  State<N> value{};
  double period = 0.0;
  double t_ref = 0.0;
  double step = 0.0;
  std::vector<State<N>> samples;
  std::vector<State<N>> derivs;
  OrbitDiagnostics diagnostics;

  static AttractorOrbit constant(const State<N>& v) {
    AttractorOrbit o;
    o.value = v;
    return o;
  }

  State<N> operator()(double t) const {
    if (kind == OrbitKind::Equilibrium) return value;
    double u = t - t_ref;
    if (kind == OrbitKind::PeriodicOrbit) {
      u = std::fmod(u, period);
      if (u < 0.0) u += period;
    } else if (u < -1e-9 * step || u > step * static_cast<double>(samples.size() - 1) * (1.0 + 1e-12)) {
      throw OutOfSpan("quasi-stationary orbit evaluated outside its tail window");
    }
    const std::size_t last = samples.size() - 1;
    double pos = u / step;
    auto j = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(last - 1)));
    const double s = std::clamp(pos - static_cast<double>(j), 0.0, 1.0);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2,
                 h11 = s3 - s2;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = h00 * samples[j][i] + h10 * step * derivs[j][i] + h01 * samples[j + 1][i] +
             h11 * step * derivs[j + 1][i];
    return y;
  }

  double component(double t, std::size_t i) const { return (*this)(t)[i]; }

  /// Largest and smallest value of one component over the stored samples.
  std::pair<double, double> range(std::size_t i) const {
    if (kind == OrbitKind::Equilibrium) return {value[i], value[i]};
    double lo = samples.front()[i], hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    return {lo, hi};
  }

  /// Export one period (or the tail window) at `points` equally spaced phases.
  void write_csv(std::ostream& os, std::span<const std::string> names, std::size_t points = 256) const {
    os << "t";
    for (std::size_t i = 0; i < N; ++i) os << ',' << (i < names.size() ? names[i] : "y" + std::to_string(i));
    os << '\n';
    const double span = kind == OrbitKind::Equilibrium     ? 1.0
                        : kind == OrbitKind::PeriodicOrbit ? period
                                                           : step * static_cast<double>(samples.size() - 1);
    for (std::size_t k = 0; k <= points; ++k) {
      const double t = t_ref + span * static_cast<double>(k) / static_cast<double>(points);
      os << Trajectory<N>::format_double(t);
      for (double v : (*this)(t)) os << ',' << Trajectory<N>::format_double(v);
      os << '\n';
    }
  }
};

namespace detail {

template <std::size_t N>
double sup_norm(const State<N>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <std::size_t N>
double sup_dist(const State<N>& a, const State<N>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <std::size_t N>
void fill_samples(AttractorOrbit<N>& o, const Field<N>& f, const Trajectory<N>& tr, double t0,
                  double span, std::size_t count) {
  o.t_ref = t0;
  o.step = span / static_cast<double>(count);
  o.samples.resize(count + 1);
  o.derivs.resize(count + 1);
  for (std::size_t k = 0; k <= count; ++k) {
    const double t = k == count ? tr.t_end() : t0 + o.step * static_cast<double>(k);
    o.samples[k] = tr.sample(std::min(t, tr.t_end()));
    o.derivs[k] = f(t, o.samples[k]);
  }
}

}  // namespace detail

/// Integrate from `y0` until the solution settles onto an attractor.
///
/// With a period hint the state at t and t + period is compared after
/// burn-in; the orbit collapses to an Equilibrium when its samples are flat.
/// Without a hint an Equilibrium is declared when the derivative vanishes at
/// the end of burn-in, otherwise the tail window is kept as QuasiStationary.
template <std::size_t N>
AttractorOrbit<N> find_attractor(const Field<N>& f, const ConvergenceControl& ctl,
                                 std::optional<double> period_hint, const State<N>& y0) {
  const double burn = ctl.effective_burn_in(period_hint);
  if (!(burn < ctl.max_horizon)) throw std::invalid_argument("burn-in must be below max horizon");
  auto settle = integrate<N>(f, y0, 0.0, burn, ctl.integration);
  State<N> y = settle.back();
  double t = burn;
  AttractorOrbit<N> o;

  if (period_hint) {
    const double w = *period_hint;
    double prev = -1.0;
    while (true) {
      if (t + w > ctl.max_horizon + 1e-9)
        throw NoConvergence("periodic attractor not reached within horizon");
      auto seg = integrate<N>(f, y, t, t + w, ctl.integration);
      const State<N> y_next = seg.back();
      const double d = detail::sup_dist(y_next, y);
      const double scale = 1.0 + detail::sup_norm(y);
      if (prev > 0.0 && d > 0.0) o.diagnostics.contraction_rate = std::log(prev / d) / w;
      prev = d;
      if (d <= ctl.match_tol * scale) {
        detail::fill_samples(o, f, seg, t, w, ctl.samples_per_period);
        o.kind = OrbitKind::PeriodicOrbit;
        o.period = w;
        o.value = y_next;
        o.diagnostics.match_error = d;
        o.diagnostics.converged_at = t;
        double spread = 0.0;
        for (const auto& s : o.samples) spread = std::max(spread, detail::sup_dist(s, y_next));
        if (spread <= ctl.match_tol * scale) {
          double res = 0.0;
          for (std::size_t k = 0; k < o.samples.size(); k += 16)
            res = std::max(res, detail::sup_norm(f(t + o.step * static_cast<double>(k), y_next)));
          o.kind = OrbitKind::Equilibrium;
          o.diagnostics.residual = res;
          o.samples.clear();
          o.derivs.clear();
        }
        return o;
      }
      y = y_next;
      t += w;
    }
  }

  const double dnorm = detail::sup_norm(f(t, y));
  o.diagnostics.match_error = dnorm;
  o.diagnostics.converged_at = t;
  if (dnorm <= ctl.match_tol) {
    o.kind = OrbitKind::Equilibrium;
    o.value = y;
    o.diagnostics.residual = dnorm;
    return o;
  }
  auto tail = integrate<N>(f, y, t, t + ctl.tail_length, ctl.integration);
  const auto count = static_cast<std::size_t>(std::ceil(ctl.tail_length / 1.0 * 64.0));
  detail::fill_samples(o, f, tail, t, ctl.tail_length, std::max<std::size_t>(count, 2));
  o.kind = OrbitKind::QuasiStationary;
  o.value = tail.back();
  return o;
}

inline AttractorOrbit<1> scalar_attractor(const Field<1>& f, const ConvergenceControl& ctl,
                                          std::optional<double> period_hint, double y0 = 1.0) {
  return find_attractor<1>(f, ctl, period_hint, State<1>{y0});
}

inline AttractorOrbit<2> planar_attractor(const Field<2>& f, const ConvergenceControl& ctl,
                                          std::optional<double> period_hint,
                                          const State<2>& y0 = {1.0, 1.0}) {
  return find_attractor<2>(f, ctl, period_hint, y0);
}

template <std::size_t N>
std::vector<State<N>> default_probes() {
  if constexpr (N == 1) {
    return {{0.1}, {1.0}, {5.0}};
  } else if constexpr (N == 2) {
    return {{0.1, 0.1}, {2.0, 2.0}, {0.5, 1.5}};
  } else {
    std::vector<State<N>> p(3);
    for (std::size_t i = 0; i < N; ++i) {
      p[0][i] = 0.1;
      p[1][i] = 2.0;
      p[2][i] = i % 2 ? 1.5 : 0.5;
    }
    return p;
  }
}

struct AttractivityResult {
  double max_deviation = 0.0;
  std::vector<double> per_probe;
  bool passed = false;
};

/// Integrate every probe past burn-in and measure its largest distance to
/// the orbit over one period (or over the tail window) at matching phase.
/// Probes run concurrently; results are reported in probe order.
template <std::size_t N>
AttractivityResult verify_attractivity(const Field<N>& f, const AttractorOrbit<N>& orbit,
                                       const std::vector<State<N>>& probes,
                                       const ConvergenceControl& ctl) {
  for (const auto& p : probes)
    for (double v : p)
      if (!(v > 0.0)) throw std::invalid_argument("attractivity probes must be strictly positive");

  std::optional<double> period;
  if (orbit.kind == OrbitKind::PeriodicOrbit) period = orbit.period;
  double t_start, span;
  if (orbit.kind == OrbitKind::QuasiStationary) {
    t_start = orbit.t_ref;
    span = orbit.step * static_cast<double>(orbit.samples.size() - 1);
  } else {
    t_start = ctl.effective_burn_in(period);
    span = period.value_or(1.0);
  }
  auto run = [&](const State<N>& p) {
    auto tr = integrate<N>(f, p, 0.0, t_start + span, ctl.integration);
    double dev = 0.0;
    constexpr std::size_t checks = 64;
    for (std::size_t k = 0; k <= checks; ++k) {
      const double t = t_start + span * static_cast<double>(k) / checks;
      dev = std::max(dev, detail::sup_dist(tr.sample(t), orbit(t)));
    }
    return dev;
  };
  std::vector<std::future<double>> jobs;
  jobs.reserve(probes.size());
  for (const auto& p : probes) jobs.push_back(std::async(std::launch::async, run, p));
  AttractivityResult res;
  for (auto& j : jobs) {
    res.per_probe.push_back(j.get());
    res.max_deviation = std::max(res.max_deviation, res.per_probe.back());
  }
  res.passed = res.max_deviation <= 10.0 * ctl.match_tol;
  return res;
}

/// Pointwise minimum (or maximum) of two scalar orbits.
inline AttractorOrbit<1> envelope(const AttractorOrbit<1>& a, const AttractorOrbit<1>& b, bool take_min) {
  auto pick = [take_min](double x, double y) { return take_min ? std::min(x, y) : std::max(x, y); };
  if (a.kind == OrbitKind::Equilibrium && b.kind == OrbitKind::Equilibrium) {
    auto o = a;
    o.value[0] = pick(a.value[0], b.value[0]);
    return o;
  }
  const AttractorOrbit<1>& grid =
      a.kind == OrbitKind::QuasiStationary || (a.kind == OrbitKind::PeriodicOrbit &&
                                               b.kind != OrbitKind::QuasiStationary)
          ? a
          : b;
  AttractorOrbit<1> o = grid;
  for (std::size_t k = 0; k < o.samples.size(); ++k) {
    const double t = grid.t_ref + grid.step * static_cast<double>(k);
    const double va = a(t)[0], vb = b(t)[0];
    const bool use_a = take_min ? va <= vb : va >= vb;
    const auto& src = use_a ? a : b;
    o.samples[k][0] = use_a ? va : vb;
    if (src.kind == OrbitKind::Equilibrium) {
      o.derivs[k][0] = 0.0;
    } else {
      // Derivative of the selected branch by central difference on its own interpolant.
      const double h = 1e-6 * std::max(1.0, src.step * 1e3);
      o.derivs[k][0] = (src(t + h)[0] - src(t - h)[0]) / (2.0 * h);
    }
  }
  o.value[0] = pick(a.value[0], b.value[0]);
  return o;
}

}  // namespace ecoepi
