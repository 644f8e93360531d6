#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "ecoepi/model.hpp"

namespace ecoepi {

/// Sampling box and time window for the hypothesis checks.
struct ValidationGrid {
  double S_max = 10.0;
  double I_max = 10.0;
  double P_max = 10.0;
  std::size_t points_per_axis = 20;
  double t_begin = 0.0;
  double t_end = 0.0;  // 0 means one reference window of the model
  std::size_t time_samples = 512;
};

/// One hypothesis entry: a pass flag and the worst observed violation.
/// `worst` is the largest signed violation amount (<= 0 when passing).
struct HypothesisCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  std::string where;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  const HypothesisCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  bool passed(const std::string& name) const {
    const auto* c = find(name);
    return c != nullptr && c->passed;
  }
  /// Standing hypotheses on coefficients and responses: boundedness, positivity, monotonicity.
  bool standing_hypotheses_hold() const {
    for (const auto& c : checks)
      if (c.name.rfind("S1", 0) == 0 || c.name.rfind("S2", 0) == 0 ||
          c.name.rfind("vital", 0) == 0 || c.name == "common_period")
        if (!c.passed) return false;
    return true;
  }
  /// Side conditions of the extinction result based on s* and y*.
  bool extinction_basic_conditions() const {
    return (passed("G affine-linear") && passed("g(S+I,0,P) <= g(S,I,P)")) ||
           passed("g independent of I");
  }
  /// Side conditions of the refined extinction result.
  bool extinction_refined_conditions() const {
    return passed("g(S+I,0,P) <= g(S,I,P)") &&
           (passed("G affine-linear") || passed("g independent of I"));
  }
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

namespace detail {

class CheckAccumulator {
 public:
  explicit CheckAccumulator(std::string name) { check_.name = std::move(name); }

  // Record a sample whose violation amount is `excess` (> tol means failure).
  template <typename WhereFn>
  void observe_lazy(double excess, double tol, WhereFn&& where) {
    if (!std::isfinite(excess)) excess = HUGE_VAL;
    if (excess > check_.worst || !seen_) {
      check_.worst = excess;
      check_.where = where();
    }
    seen_ = true;
    if (excess > tol) check_.passed = false;
  }
  void fail(const std::string& where) {
    check_.passed = false;
    check_.where = where;
  }
  HypothesisCheck finish() {
    if (!seen_) check_.worst = 0.0;
    return check_;
  }

 private:
  HypothesisCheck check_;
  bool seen_ = false;
};

inline std::string point(double S, double I, double P) {
  std::ostringstream os;
  os << "(S=" << S << ", I=" << I << ", P=" << P << ")";
  return os.str();
}

inline std::string at_time(double t) {
  std::ostringstream os;
  os << "t=" << t;
  return os.str();
}

}  // namespace detail

/// Sampling-based check of the standing hypotheses and of the extinction
/// side conditions on a concrete model. Failures are report entries.
inline ValidationReport validate_hypotheses(const EcoEpiModel& m, const ValidationGrid& grid = {}) {
  using detail::CheckAccumulator;
  using detail::point;
  ValidationReport rep;
  const double t0 = grid.t_begin;
  const double t1 = grid.t_end > grid.t_begin ? grid.t_end : t0 + m.reference_window();
  const std::size_t nt = std::max<std::size_t>(grid.time_samples, 2);
  auto time_at = [&](std::size_t i) {
    return t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(nt - 1);
  };

  {
    CheckAccumulator acc("S1 coefficients bounded, nonnegative");
    for (const auto& [name, coef] : m.coefficients()) {
      for (std::size_t i = 0; i < nt; ++i) {
        const double t = time_at(i);
        const double v = coef->value(t);
        const double excess = std::isfinite(v) ? -v : HUGE_VAL;
        acc.observe_lazy(excess, 0.0, [&] { return name + " at " + detail::at_time(t); });
      }
    }
    rep.checks.push_back(acc.finish());
  }

  const std::size_t n = std::max<std::size_t>(grid.points_per_axis, 2);
  auto axis = [n](double hi, std::size_t i) {
    return hi * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  const double tol = 1e-12;

  CheckAccumulator f_nonneg("S2 f nonnegative"), g_nonneg("S2 g nonnegative");
  CheckAccumulator f_I("S2 f nonincreasing in I"), f_P("S2 f nonincreasing in P");
  CheckAccumulator g_S("S2 g nonincreasing in S"), g_I("S2 g nonincreasing in I");
  CheckAccumulator g_P("S2 g nondecreasing in P");
  CheckAccumulator g_indep("g independent of I"), g_sum("g(S+I,0,P) <= g(S,I,P)");

  for (std::size_t i = 0; i < n; ++i) {
    const double S = axis(grid.S_max, i);
    for (std::size_t j = 0; j < n; ++j) {
      const double I = axis(grid.I_max, j);
      for (std::size_t k = 0; k < n; ++k) {
        const double P = axis(grid.P_max, k);
        const double fv = m.f(S, I, P), gv = m.g(S, I, P);
        const auto here = [&] { return point(S, I, P); };
        const double scale_f = tol * (1.0 + std::abs(fv));
        const double scale_g = tol * (1.0 + std::abs(gv));
        f_nonneg.observe_lazy(-fv, 0.0, here);
        g_nonneg.observe_lazy(-gv, 0.0, here);
        if (j + 1 < n) {
          const double In = axis(grid.I_max, j + 1);
          f_I.observe_lazy(m.f(S, In, P) - fv, scale_f, here);
          g_I.observe_lazy(m.g(S, In, P) - gv, scale_g, here);
        }
        if (k + 1 < n) {
          const double Pn = axis(grid.P_max, k + 1);
          f_P.observe_lazy(m.f(S, I, Pn) - fv, scale_f, here);
          g_P.observe_lazy(gv - m.g(S, I, Pn), scale_g, here);
        }
        if (i + 1 < n) {
          const double Sn = axis(grid.S_max, i + 1);
          g_S.observe_lazy(m.g(Sn, I, P) - gv, scale_g, here);
        }
        g_indep.observe_lazy(std::abs(gv - m.g(S, 0.0, P)), scale_g, here);
        g_sum.observe_lazy(m.g(S + I, 0.0, P) - gv, scale_g, here);
      }
    }
  }
  for (auto* acc : {&f_nonneg, &g_nonneg, &f_I, &f_P, &g_S, &g_I, &g_P})
    rep.checks.push_back(acc->finish());

  {
    HypothesisCheck lip{"S2 locally Lipschitz", m.f.locally_lipschitz() && m.g.locally_lipschitz(),
                        0.0, ""};
    if (!lip.passed) lip.where = "response exponent below 1 has unbounded slope at 0";
    rep.checks.push_back(lip);
  }

  if (std::holds_alternative<SusceptibleVitalDynamics::AffineLinear>(m.G.form())) {
    // No per-capita factor: nothing to check beyond the coefficients.
  } else {
    CheckAccumulator k0("vital k(t,0) > 0"), kdec("vital dk/dS < 0");
    for (std::size_t it = 0; it < nt; it += std::max<std::size_t>(nt / 64, 1)) {
      const double t = time_at(it);
      k0.observe_lazy(-m.G.per_capita(t, 0.0), -1e-300, [&] { return detail::at_time(t); });
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double S = axis(grid.S_max, i), Sn = axis(grid.S_max, i + 1);
        const double slope = (m.G.per_capita(t, Sn) - m.G.per_capita(t, S)) / (Sn - S);
        kdec.observe_lazy(slope, -1e-300, [&] { return detail::at_time(t) + " S=" + std::to_string(S); });
      }
    }
    rep.checks.push_back(k0.finish());
    rep.checks.push_back(kdec.finish());
  }
  {
    CheckAccumulator slope("vital predator slope > 0");
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = time_at(i);
      slope.observe_lazy(-m.h.slope(t), -1e-300, [&] { return detail::at_time(t); });
    }
    rep.checks.push_back(slope.finish());
  }

  if (m.common_period) {
    CheckAccumulator per("common_period");
    const double w = *m.common_period;
    if (!(w > 0.0)) {
      per.fail("common period must be > 0");
    } else {
      for (const auto& [name, coef] : m.coefficients())
        for (std::size_t i = 0; i < nt; ++i) {
          const double t = time_at(i);
          const double d = std::abs(coef->value(t + w) - coef->value(t));
          per.observe_lazy(d, 1e-9 * (1.0 + std::abs(coef->value(t))),
                           [&] { return name + " at " + detail::at_time(t); });
        }
    }
    rep.checks.push_back(per.finish());
  }

  rep.checks.push_back(
      HypothesisCheck{"G affine-linear", m.G.is_affine(), 0.0, m.G.is_affine() ? "" : m.G.kind_name()});
  rep.checks.push_back(g_indep.finish());
  rep.checks.push_back(g_sum.finish());
  return rep;
}

}  // namespace ecoepi
