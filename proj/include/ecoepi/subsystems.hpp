#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ecoepi/attractor.hpp"
#include "ecoepi/errors.hpp"
#include "ecoepi/model.hpp"

namespace ecoepi {

/// Realization of the perturbed vital laws in the auxiliary families:
///   upper:  G + sigma*eps,       h + sigma*eps
///   lower:  G - sigma*eps*x,     h - sigma*eps
/// sigma = 0 (the default) leaves G and h untouched, so eps enters only
/// through the v(eps) rho terms.
struct SandwichShift {
  double sigma = 0.0;
};

/// Upper family: x' = G_{2,eps}(t,x),
///               z' = h_{2,eps}(t,z) z + gamma a f(x,0,z) z + v(eps) rho(t) g(x,0,z).
inline Field<2> build_sp2(const EcoEpiModel& m, double eps, const VRhoSpec& spec = {},
                          SandwichShift shift = {}) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  const double ve = spec.v(eps);
  const double se = shift.sigma * eps;
  return [m, spec, ve, se](double t, const State<2>& y) -> State<2> {
    const double x = std::max(y[0], 0.0), z = std::max(y[1], 0.0);
    const double gain = m.gamma(t) * m.a(t) * m.f.value_clamped(x, 0.0, z) * z;
    return {m.G(t, x) + se,
            (m.h(t, z) + se) * z + gain + ve * spec.rho(t) * m.g.value_clamped(x, 0.0, z)};
  };
}

/// Lower family, driven by the predator component of the upper attractor:
///   x' = G_{1,eps}(t,x) - a f(x,0,0) zhat(t) - v(eps) rho(t) x,
///   z' = h_{1,eps}(t,z) z + gamma a f(x, v(eps) rho_upper, z) z.
inline Field<2> build_sp1(const EcoEpiModel& m, double eps, const VRhoSpec& spec,
                          const AttractorOrbit<2>& zhat, SandwichShift shift = {}) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  const double ve = spec.v(eps);
  const double se = shift.sigma * eps;
  const double I_bar = ve * spec.rho_upper;
  return [m, spec, ve, se, I_bar, zhat](double t, const State<2>& y) -> State<2> {
    const double x = std::max(y[0], 0.0), z = std::max(y[1], 0.0);
    const double a = m.a(t);
    const double zh = std::max(zhat.component(t, 1), 0.0);
    return {m.G(t, x) - se * x - a * m.f.value_clamped(x, 0.0, 0.0) * zh - ve * spec.rho(t) * x,
            (m.h(t, z) - se) * z + m.gamma(t) * a * m.f.value_clamped(x, I_bar, z) * z};
  };
}

/// Predator-free prey equation s' = G(t,s).
inline Field<1> prey_alone_field(const EcoEpiModel& m) {
  return [m](double t, const State<1>& s) -> State<1> { return {m.G(t, std::max(s[0], 0.0))}; };
}

/// Prey-free predator equation y' = h(t,y) y.
inline Field<1> predator_alone_field(const EcoEpiModel& m) {
  return [m](double t, const State<1>& y) -> State<1> {
    const double v = std::max(y[0], 0.0);
    return {m.h(t, v) * v};
  };
}

/// Bounds after one pass of the refinement chain. `s_upper` / `y_lower`
/// are the refined pair entering the refined extinction number.
struct ChainLevel {
  AttractorOrbit<1> s_upper;
  AttractorOrbit<1> s_lower;
  AttractorOrbit<1> y_lower;
  AttractorOrbit<1> y_upper;
};

namespace detail {

inline AttractorOrbit<1> chain_stage(const Field<1>& f, const ConvergenceControl& ctl,
                                     std::optional<double> period, double y0, std::size_t stage,
                                     const char* what) {
  try {
    return scalar_attractor(f, ctl, period, y0);
  } catch (const NoConvergence& e) {
    throw NoConvergence(std::string("refined chain stage ") + std::to_string(stage) + " (" + what +
                            "): " + e.what(),
                        stage);
  }
}

}  // namespace detail

/// Iterated comparison bounds for S and P using the absorbing bound L.
/// Level 0 is (s_lower, s_upper, y_lower, y_upper) = (0, s*, y*, L); each
/// further level solves the four comparison equations with the previous
/// bounds and keeps the tighter of old and new envelope. Stages are counted
/// from 1 in the order s_upper, s_lower, y_lower, y_upper of each level.
inline std::vector<ChainLevel> refined_chain(const EcoEpiModel& m, double L, std::size_t depth,
                                             const ConvergenceControl& ctl = {},
                                             std::optional<AttractorOrbit<1>> s_star = std::nullopt,
                                             std::optional<AttractorOrbit<1>> y_star = std::nullopt) {
  if (depth < 1) throw std::invalid_argument("refined chain depth must be >= 1");
  if (!(L > 0.0)) throw std::invalid_argument("absorbing bound L must be > 0");
  const auto period = m.common_period;
  std::size_t stage = 0;
  ChainLevel cur;
  cur.s_upper = s_star ? *s_star
                       : detail::chain_stage(prey_alone_field(m), ctl, period, 1.0, stage, "s*");
  cur.y_lower = y_star ? *y_star
                       : detail::chain_stage(predator_alone_field(m), ctl, period, 1.0, stage, "y*");
  cur.s_lower = AttractorOrbit<1>::constant({0.0});
  cur.y_upper = AttractorOrbit<1>::constant({L});

  std::vector<ChainLevel> out;
  for (std::size_t k = 0; k < depth; ++k) {
    const ChainLevel prev = cur;
    ChainLevel next;

    auto f_su = [m, L, prev](double t, const State<1>& s) -> State<1> {
      const double x = std::max(s[0], 0.0);
      const double yu = prev.y_upper.component(t, 0), yl = prev.y_lower.component(t, 0);
      return {m.G(t, x) - m.a(t) * m.f.value_clamped(x, L, yu) * yl};
    };
    auto su = detail::chain_stage(f_su, ctl, period, prev.s_upper.value[0] + 0.1, ++stage, "s upper");
    next.s_upper = envelope(prev.s_upper, su, true);

    auto f_sl = [m, L, prev](double t, const State<1>& s) -> State<1> {
      const double x = std::max(s[0], 0.0);
      const double yu = prev.y_upper.component(t, 0), yl = prev.y_lower.component(t, 0);
      return {m.G(t, x) - m.a(t) * m.f.value_clamped(x, 0.0, yl) * yu - m.beta(t) * x * L};
    };
    auto sl = detail::chain_stage(f_sl, ctl, period, std::max(prev.s_upper.value[0], 0.1), ++stage,
                                  "s lower");
    next.s_lower = envelope(prev.s_lower, sl, false);

    auto f_yl = [m, L, lo = next.s_lower](double t, const State<1>& y) -> State<1> {
      const double v = std::max(y[0], 0.0);
      return {m.h(t, v) * v + m.gamma(t) * m.a(t) * m.f.value_clamped(lo.component(t, 0), L, v) * v};
    };
    auto yl = detail::chain_stage(f_yl, ctl, period, std::max(prev.y_lower.value[0], 0.1), ++stage,
                                  "y lower");
    next.y_lower = envelope(prev.y_lower, yl, false);

    auto f_yu = [m, L, up = next.s_upper](double t, const State<1>& y) -> State<1> {
      const double v = std::max(y[0], 0.0);
      return {m.h(t, v) * v + m.gamma(t) * m.a(t) * m.f.value_clamped(up.component(t, 0), 0.0, v) * v +
              m.theta(t) * m.eta(t) * m.g.value_clamped(0.0, 0.0, v) * L};
    };
    auto yu = detail::chain_stage(f_yu, ctl, period, L, ++stage, "y upper");
    next.y_upper = envelope(prev.y_upper, yu, true);

    out.push_back(next);
    cur = next;
  }
  return out;
}

}  // namespace ecoepi
