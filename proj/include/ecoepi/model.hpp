#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecoepi/coefficient.hpp"
#include "ecoepi/response.hpp"
#include "ecoepi/vital.hpp"

namespace ecoepi {

template <std::size_t N>
using State = std::array<double, N>;

/// Right-hand side of a nonautonomous N-dimensional system.
template <std::size_t N>
using Field = std::function<State<N>(double, const State<N>&)>;

struct ModelState {
  double S = 0.0;
  double I = 0.0;
  double P = 0.0;

  State<3> to_array() const { return {S, I, P}; }
  static ModelState from_array(const State<3>& y) { return {y[0], y[1], y[2]}; }
};

/// The eco-epidemiological system
///   S' = G(t,S) - a f(S,I,P) P - beta S I
///   I' = beta S I - eta g(S,I,P) I - c I
///   P' = h(t,P) P + gamma a f(S,I,P) P + theta eta g(S,I,P) I
struct EcoEpiModel {
  std::string name;
  TimeCoefficient a;
  TimeCoefficient beta;
  TimeCoefficient eta;
  TimeCoefficient c;
  TimeCoefficient gamma;
  TimeCoefficient theta;
  FunctionalResponse f;
  FunctionalResponse g;
  SusceptibleVitalDynamics G;
  PredatorVitalRate h;
  std::optional<double> common_period;

  /// Named view over every time coefficient, including those inside G and h.
  std::vector<std::pair<std::string, const TimeCoefficient*>> coefficients() const {
    std::vector<std::pair<std::string, const TimeCoefficient*>> out = {
        {"a", &a}, {"beta", &beta}, {"eta", &eta}, {"c", &c}, {"gamma", &gamma}, {"theta", &theta}};
    if (const auto* af = std::get_if<SusceptibleVitalDynamics::AffineLinear>(&G.form())) {
      out.emplace_back("G.Lambda", &af->Lambda);
      out.emplace_back("G.mu", &af->mu);
    } else if (const auto* lf = std::get_if<SusceptibleVitalDynamics::LogisticFactor>(&G.form())) {
      out.emplace_back("G.growth", &lf->growth);
      out.emplace_back("G.crowding", &lf->crowding);
    }
    const bool grow = h.sign == PredatorVitalRate::Sign::Growth;
    out.emplace_back(grow ? "h.b" : "h.delta1", &h.intercept);
    out.emplace_back(grow ? "h.r" : "h.delta2", &h.slope);
    return out;
  }

  /// Window over which coefficient extrema and means are taken.
  double reference_window() const { return common_period.value_or(1.0); }
};

/// Perturbation function v and weight rho entering the auxiliary subsystems.
/// v(eps) = v_slope * eps with v_slope in [A, B]; rho(t) within [rho_lower, rho_upper].
struct VRhoSpec {
  double v_slope_lower = 1.0;  // A
  double v_slope_upper = 1.0;  // B
  double v_slope = 1.0;
  double rho_lower = 1.0;
  double rho_upper = 1.0;
  TimeCoefficient rho = TimeCoefficient::constant(1.0);

  double v(double eps) const { return v_slope * eps; }

  void validate(double window = 1.0) const {
    if (!(v_slope_lower > 0.0) || !(v_slope_upper >= v_slope_lower))
      throw std::invalid_argument("VRhoSpec requires 0 < A <= B");
    if (!(v_slope >= v_slope_lower && v_slope <= v_slope_upper))
      throw std::invalid_argument("VRhoSpec v slope must lie in [A, B]");
    if (!(rho_lower > 0.0) || !(rho_upper >= rho_lower))
      throw std::invalid_argument("VRhoSpec requires 0 < rho_lower <= rho_upper");
    const auto b = sampled_bounds(rho, window);
    if (b.lower < rho_lower - 1e-12 || b.upper > rho_upper + 1e-12)
      throw std::invalid_argument("VRhoSpec rho leaves its declared bounds");
  }
};

inline State<3> full_rhs(const EcoEpiModel& m, double t, const State<3>& y) {
  const double S = y[0], I = y[1], P = y[2];
  const double a = m.a(t), beta = m.beta(t), eta = m.eta(t), c = m.c(t);
  const double fv = m.f.value_clamped(S, I, P);
  const double gv = m.g.value_clamped(S, I, P);
  const double predation = a * fv * P;
  const double infection = beta * S * I;
  return {m.G(t, S) - predation - infection,
          infection - eta * gv * I - c * I,
          m.h(t, P) * P + m.gamma(t) * predation + m.theta(t) * eta * gv * I};
}

inline ModelState full_rhs(const EcoEpiModel& m, double t, const ModelState& s) {
  return ModelState::from_array(full_rhs(m, t, s.to_array()));
}

/// The infected-free planar system in (x, z) = (S, P).
inline State<2> uninfected_rhs(const EcoEpiModel& m, double t, const State<2>& xz) {
  const double x = xz[0], z = xz[1];
  const double af = m.a(t) * m.f.value_clamped(x, 0.0, z) * z;
  return {m.G(t, x) - af, m.h(t, z) * z + m.gamma(t) * af};
}

inline Field<3> full_field(const EcoEpiModel& m) {
  return [m](double t, const State<3>& y) { return full_rhs(m, t, y); };
}

inline Field<2> uninfected_field(const EcoEpiModel& m) {
  return [m](double t, const State<2>& y) { return uninfected_rhs(m, t, y); };
}

}  // namespace ecoepi
