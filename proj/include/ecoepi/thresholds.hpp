#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecoepi/attractor.hpp"
#include "ecoepi/errors.hpp"
#include "ecoepi/json_format.hpp"
#include "ecoepi/model.hpp"
#include "ecoepi/quadrature.hpp"
#include "ecoepi/subsystems.hpp"
#include "ecoepi/validation.hpp"

namespace ecoepi {

struct ThresholdConfig {
  std::optional<double> lambda;  // window length; defaults to the common period, else 1
  double tail_windows = 50.0;    // tail length in units of lambda
  std::size_t steps_per_window = 2048;
  std::size_t depth = 2;
  ConvergenceControl convergence;
  VRhoSpec vrho;
  SandwichShift shift;
  std::optional<double> L;  // caller-supplied absorbing bound
  double delta = 0.01;      // slack inside the absorbing-box templates
  bool verify = true;       // run the attractivity probes

  double resolve_lambda(const EcoEpiModel& m) const {
    const double l = lambda.value_or(m.common_period.value_or(1.0));
    if (!(l > 0.0)) throw std::invalid_argument("lambda must be > 0");
    return l;
  }
  double tail_length(const EcoEpiModel& m) const { return tail_windows * resolve_lambda(m); }
  double burn_in(const EcoEpiModel& m) const { return convergence.effective_burn_in(m.common_period); }

  void validate() const {
    if (tail_windows < 10.0) throw std::invalid_argument("tail must cover at least 10 windows");
    if (steps_per_window < 2 || steps_per_window % 2 != 0)
      throw std::invalid_argument("steps per window must be even and >= 2");
    if (depth < 1) throw std::invalid_argument("refinement depth must be >= 1");
  }

  /// Convergence settings with the quasi-stationary window widened to the tail.
  ConvergenceControl attractor_control(const EcoEpiModel& m) const {
    auto c = convergence;
    c.tail_length = std::max(c.tail_length, tail_length(m));
    return c;
  }
};

/// beta s - eta g(s, 0, y) - c along a pair of attractor components.
inline std::function<double(double)> threshold_integrand(const EcoEpiModel& m,
                                                         std::function<double(double)> s,
                                                         std::function<double(double)> y) {
  return [m, s = std::move(s), y = std::move(y)](double t) {
    const double sv = std::max(s(t), 0.0), yv = std::max(y(t), 0.0);
    return m.beta(t) * sv - m.eta(t) * m.g.value_clamped(sv, 0.0, yv) - m.c(t);
  };
}

/// Extremes of the windowed integral of phi over the tail after burn-in.
inline WindowExtrema tail_window_extrema(const EcoEpiModel& m, const ThresholdConfig& cfg,
                                         const std::function<double(double)>& phi) {
  cfg.validate();
  const double lam = cfg.resolve_lambda(m);
  const double T0 = cfg.burn_in(m);
  const double T = cfg.tail_length(m);
  const auto windows = static_cast<std::size_t>(std::llround(T / lam));
  auto series = SampledSeries::tabulate(phi, T0, lam * static_cast<double>(windows),
                                        windows * cfg.steps_per_window);
  return window_extrema(series, lam);
}

struct UpperAttractors {
  AttractorOrbit<1> s_star;
  AttractorOrbit<1> y_star;
};

struct LowerAttractors {
  AttractorOrbit<2> sp2;  // (x2*, z2*)
  AttractorOrbit<2> sp1;  // (x1*, z1*)
};

inline UpperAttractors compute_upper_attractors(const EcoEpiModel& m, const ThresholdConfig& cfg,
                                                double s0 = 1.0, double y0 = 1.0) {
  const auto ctl = cfg.attractor_control(m);
  return {scalar_attractor(prey_alone_field(m), ctl, m.common_period, s0),
          scalar_attractor(predator_alone_field(m), ctl, m.common_period, y0)};
}

inline LowerAttractors compute_lower_attractors(const EcoEpiModel& m, const ThresholdConfig& cfg,
                                                double eps = 0.0, State<2> sp2_0 = {1.0, 1.0},
                                                State<2> sp1_0 = {1.0, 1.0}) {
  const auto ctl = cfg.attractor_control(m);
  LowerAttractors la;
  la.sp2 = planar_attractor(build_sp2(m, eps, cfg.vrho, cfg.shift), ctl, m.common_period, sp2_0);
  la.sp1 = planar_attractor(build_sp1(m, eps, cfg.vrho, la.sp2, cfg.shift), ctl, m.common_period,
                            sp1_0);
  return la;
}

inline double r_upper_from(const EcoEpiModel& m, const ThresholdConfig& cfg, const UpperAttractors& u) {
  auto phi = threshold_integrand(
      m, [s = u.s_star](double t) { return s.component(t, 0); },
      [y = u.y_star](double t) { return y.component(t, 0); });
  return tail_window_extrema(m, cfg, phi).max;
}

inline double r_lower_from(const EcoEpiModel& m, const ThresholdConfig& cfg, const LowerAttractors& l) {
  auto phi = threshold_integrand(
      m, [x = l.sp1](double t) { return x.component(t, 0); },
      [z = l.sp2](double t) { return z.component(t, 1); });
  return tail_window_extrema(m, cfg, phi).min;
}

/// Upper threshold: limsup of windowed integrals along (s*, y*).
inline double r_upper(const EcoEpiModel& m, const ThresholdConfig& cfg = {}) {
  return r_upper_from(m, cfg, compute_upper_attractors(m, cfg));
}

/// Lower threshold: liminf of windowed integrals along (x1*, z2*) at eps = 0.
inline double r_lower(const EcoEpiModel& m, const ThresholdConfig& cfg = {}) {
  return r_lower_from(m, cfg, compute_lower_attractors(m, cfg));
}

struct PeriodicRatios {
  double lower = 0.0;
  double upper = 0.0;
};

inline double periodic_ratio(const EcoEpiModel& m, double t0, const std::function<double(double)>& s,
                             const std::function<double(double)>& y) {
  if (!m.common_period) throw NotPeriodic("periodic means need a common period");
  const double w = *m.common_period;
  const double num = period_mean([&](double t) { return m.beta(t) * std::max(s(t), 0.0); }, t0, w);
  const double pred = period_mean(
      [&](double t) { return m.eta(t) * m.g.value_clamped(std::max(s(t), 0.0), 0.0, std::max(y(t), 0.0)); },
      t0, w);
  const double cbar = period_mean([&](double t) { return m.c(t); }, t0, w);
  const double den = pred + cbar;
  if (!(den > 0.0)) throw NumericError("periodic ratio denominator is not positive");
  return num / den;
}

inline PeriodicRatios r_per_pair_from(const EcoEpiModel& m, const ThresholdConfig& cfg,
                                      const UpperAttractors& u, const LowerAttractors& l) {
  if (!m.common_period) throw NotPeriodic("model has no common period");
  const double t0 = cfg.burn_in(m);
  PeriodicRatios r;
  r.upper = periodic_ratio(m, t0, [&](double t) { return u.s_star.component(t, 0); },
                           [&](double t) { return u.y_star.component(t, 0); });
  r.lower = periodic_ratio(m, t0, [&](double t) { return l.sp1.component(t, 0); },
                           [&](double t) { return l.sp2.component(t, 1); });
  return r;
}

inline PeriodicRatios r_per_pair(const EcoEpiModel& m, const ThresholdConfig& cfg = {}) {
  if (!m.common_period) throw NotPeriodic("model has no common period");
  return r_per_pair_from(m, cfg, compute_upper_attractors(m, cfg), compute_lower_attractors(m, cfg));
}

/// Box that eventually contains every trajectory: S + I <= SI_top, P <= P_top.
struct AbsorbingBound {
  double SI_top = 0.0;
  double P_top = 0.0;
  double L = 0.0;
  std::string template_name;
};

namespace detail {

inline SampledBounds coefficient_bounds(const TimeCoefficient& c) {
  return sampled_bounds(c, c.period().value_or(1.0));
}

}  // namespace detail

inline AbsorbingBound absorbing_bound(const EcoEpiModel& m, double delta = 0.01,
                                      std::optional<double> user_L = std::nullopt) {
  if (user_L) {
    if (!(*user_L > 0.0)) throw std::invalid_argument("absorbing bound L must be > 0");
    return {0.0, 0.0, *user_L, "user"};
  }
  using detail::coefficient_bounds;
  const auto cb = coefficient_bounds(m.c);
  if (!(cb.lower > 0.0)) throw NoTemplateMatch("removal rate c must be bounded away from zero");
  AbsorbingBound box;
  const auto fgain = m.f.linear_gain_in_S();
  const auto& form = m.G.form();
  if (const auto* af = std::get_if<SusceptibleVitalDynamics::AffineLinear>(&form)) {
    const double Lu = coefficient_bounds(af->Lambda).upper;
    const double mul = coefficient_bounds(af->mu).lower;
    if (!(mul > 0.0)) throw NoTemplateMatch("affine G needs mu bounded away from zero");
    box.SI_top = Lu / std::min(mul, cb.lower) + delta;
    box.template_name = "affine";
  } else if (const auto* lf = std::get_if<SusceptibleVitalDynamics::LogisticFactor>(&form)) {
    const auto gb = coefficient_bounds(lf->growth);
    const auto kb = coefficient_bounds(lf->crowding);
    if (!(kb.lower > 0.0)) throw NoTemplateMatch("logistic G needs crowding bounded away from zero");
    if (fgain) {
      box.SI_top = (gb.upper * gb.upper / (4.0 * kb.lower) + cb.upper * gb.upper / kb.lower) / cb.lower;
      box.template_name = "logistic_linear_f";
    } else {
      // S1(t) = growth / crowding
      double s1 = 0.0;
      const double w = m.reference_window();
      for (std::size_t i = 0; i <= 4096; ++i) {
        const double t = w * static_cast<double>(i) / 4096.0;
        s1 = std::max(s1, lf->growth(t) / lf->crowding(t));
      }
      box.SI_top = (gb.upper + cb.lower) * (s1 + delta) / cb.lower;
      box.template_name = "logistic_bounded_f";
    }
  } else {
    const auto& cl = std::get<SusceptibleVitalDynamics::CustomLogistic>(form);
    box.SI_top = (cl.k_upper + cb.lower) * (cl.s1_upper + delta) / cb.lower;
    box.template_name = "custom_logistic";
  }

  const auto ggain = m.g.linear_gain_in_P();
  if (!ggain) throw NoTemplateMatch("absorbing template needs g linear in P");
  double F = 0.0;
  if (fgain) F = *fgain * box.SI_top;
  else if (auto sup = m.f.supremum()) F = *sup;
  else throw NoTemplateMatch("absorbing template needs f linear in S or bounded");
  const double gain = coefficient_bounds(m.gamma).upper * coefficient_bounds(m.a).upper * F +
                      coefficient_bounds(m.theta).upper * coefficient_bounds(m.eta).upper * *ggain *
                          box.SI_top;
  const auto ib = coefficient_bounds(m.h.intercept);
  const auto sl = coefficient_bounds(m.h.slope);
  if (!(sl.lower > 0.0)) throw NoTemplateMatch("predator slope must be bounded away from zero");
  if (m.h.sign == PredatorVitalRate::Sign::Growth)
    box.P_top = (ib.upper + gain) / sl.lower;
  else
    box.P_top = std::max(0.0, -ib.lower + gain) / sl.lower;
  box.L = box.SI_top + box.P_top;
  return box;
}

/// Refined upper thresholds along (s_upper, y_lower) at each chain depth.
inline std::vector<double> r_upper_refined_from(const EcoEpiModel& m, const ThresholdConfig& cfg,
                                                const std::vector<ChainLevel>& chain) {
  std::vector<double> out;
  out.reserve(chain.size());
  for (const auto& lv : chain) {
    auto phi = threshold_integrand(
        m, [s = lv.s_upper](double t) { return s.component(t, 0); },
        [y = lv.y_lower](double t) { return y.component(t, 0); });
    out.push_back(tail_window_extrema(m, cfg, phi).max);
  }
  return out;
}

inline std::vector<double> r_upper_refined(const EcoEpiModel& m, const ThresholdConfig& cfg, double L) {
  return r_upper_refined_from(m, cfg, refined_chain(m, L, cfg.depth, cfg.attractor_control(m)));
}

enum class Classification { Persistent, Extinct, Inconclusive };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Persistent: return "Persistent";
    case Classification::Extinct: return "Extinct";
    default: return "Inconclusive";
  }
}

struct Gate {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AttractorSummary {
  std::string name;
  OrbitKind kind = OrbitKind::Equilibrium;
  std::vector<double> min;
  std::vector<double> max;
  double residual = 0.0;
  double match_error = 0.0;
  std::optional<double> attractivity_deviation;
};

template <std::size_t N>
AttractorSummary summarize(const std::string& name, const AttractorOrbit<N>& o,
                           std::optional<double> dev = std::nullopt) {
  AttractorSummary s{name, o.kind, {}, {}, o.diagnostics.residual, o.diagnostics.match_error, dev};
  for (std::size_t i = 0; i < N; ++i) {
    auto [lo, hi] = o.range(i);
    s.min.push_back(lo);
    s.max.push_back(hi);
  }
  return s;
}

struct ThresholdReport {
  std::string model;
  double lambda = 1.0;
  double burn_in = 0.0;
  double tail = 0.0;
  std::optional<double> R_lower;
  std::optional<double> R_upper;
  std::optional<double> R_lower_per;
  std::optional<double> R_upper_per;
  std::vector<double> refined_uppers;
  std::optional<AbsorbingBound> absorbing;
  Classification classification = Classification::Inconclusive;
  std::vector<Gate> gates;
  std::vector<AttractorSummary> attractors;
  std::vector<std::string> reasons;
  std::string realization;

  const Gate* gate(const std::string& name) const {
    for (const auto& g : gates)
      if (g.name == name) return &g;
    return nullptr;
  }

  /// min(R_upper, refined uppers), when any is available.
  std::optional<double> best_upper() const {
    std::optional<double> b = R_upper;
    for (double r : refined_uppers) b = b ? std::min(*b, r) : r;
    return b;
  }

  json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["model"] = model;
    j["lambda"] = lambda;
    j["burn_in"] = burn_in;
    j["tail"] = tail;
    j["R_lower"] = opt(R_lower);
    j["R_upper"] = opt(R_upper);
    j["R_lower_per"] = opt(R_lower_per);
    j["R_upper_per"] = opt(R_upper_per);
    j["refined_uppers"] = refined_uppers;
    if (absorbing)
      j["absorbing_bound"] = {{"S_plus_I_top", absorbing->SI_top},
                              {"P_top", absorbing->P_top},
                              {"L", absorbing->L},
                              {"template", absorbing->template_name}};
    else
      j["absorbing_bound"] = nullptr;
    j["classification"] = classification_name(classification);
    j["gates"] = json::array();
    for (const auto& g : gates) j["gates"].push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
    j["attractors"] = json::array();
    for (const auto& a : attractors) {
      json e{{"name", a.name}, {"kind", orbit_kind_name(a.kind)}, {"min", a.min}, {"max", a.max},
             {"residual", a.residual}, {"match_error", a.match_error}};
      e["attractivity_deviation"] = opt(a.attractivity_deviation);
      j["attractors"].push_back(e);
    }
    j["reasons"] = reasons;
    j["realization"] = realization;
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(6);
    auto show = [&](const char* label, const std::optional<double>& v) {
      os << "  " << label << " = ";
      if (v) os << *v;
      else os << "n/a";
      os << '\n';
    };
    os << "model: " << model << "\n  lambda = " << lambda << "  burn-in = " << burn_in
       << "  tail = " << tail << '\n';
    show("R_upper    ", R_upper);
    show("R_lower    ", R_lower);
    show("R_upper_per", R_upper_per);
    show("R_lower_per", R_lower_per);
    for (std::size_t k = 0; k < refined_uppers.size(); ++k)
      os << "  R_upper_refined[" << k + 1 << "] = " << refined_uppers[k] << '\n';
    if (absorbing) os << "  L = " << absorbing->L << " (" << absorbing->template_name << ")\n";
    os << "classification: " << classification_name(classification) << '\n';
    for (const auto& g : gates)
      os << "  [" << (g.passed ? "ok" : "--") << "] " << g.name << (g.detail.empty() ? "" : ": " + g.detail)
         << '\n';
    for (const auto& r : reasons) os << "  note: " << r << '\n';
    return os.str();
  }
};

/// Full threshold evaluation and classification. Numerical failures in
/// any stage are recorded as failed gates; the result is then Inconclusive.
inline ThresholdReport classify(const EcoEpiModel& m, const ThresholdConfig& cfg = {},
                                const ValidationGrid& grid = {}) {
  cfg.validate();
  ThresholdReport rep;
  rep.model = m.name;
  rep.lambda = cfg.resolve_lambda(m);
  rep.burn_in = cfg.burn_in(m);
  rep.tail = cfg.tail_length(m);
  {
    std::ostringstream os;
    os << "eps=0; upper/lower vital laws shifted by " << cfg.shift.sigma << "*eps; v(eps)="
       << cfg.vrho.v_slope << "*eps";
    rep.realization = os.str();
  }
  const auto ctl = cfg.attractor_control(m);
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    rep.gates.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };

  const auto val = validate_hypotheses(m, grid);
  const bool standing = add("standing hypotheses", val.standing_hypotheses_hold(), [&] {
    std::string failed;
    for (const auto& c : val.checks)
      if (!c.passed && (c.name.rfind("S1", 0) == 0 || c.name.rfind("S2", 0) == 0 ||
                        c.name.rfind("vital", 0) == 0 || c.name == "common_period"))
        failed += (failed.empty() ? "" : "; ") + c.name;
    return failed;
  }());
  const bool ext_basic = add("extinction side conditions", val.extinction_basic_conditions());
  const bool ext_refined = add("refined extinction side conditions", val.extinction_refined_conditions());

  // Upper attractors and R_upper.
  std::optional<UpperAttractors> up;
  bool up_ok = false;
  try {
    up = compute_upper_attractors(m, cfg);
    std::optional<double> ds, dy;
    bool verified = true;
    if (cfg.verify) {
      auto vs = verify_attractivity<1>(prey_alone_field(m), up->s_star, default_probes<1>(), ctl);
      auto vy = verify_attractivity<1>(predator_alone_field(m), up->y_star, default_probes<1>(), ctl);
      ds = vs.max_deviation;
      dy = vy.max_deviation;
      verified = vs.passed && vy.passed;
    }
    rep.attractors.push_back(summarize("s*", up->s_star, ds));
    rep.attractors.push_back(summarize("y*", up->y_star, dy));
    up_ok = add("s*, y* attractivity", verified, cfg.verify ? "max deviation " + fmt(std::max(*ds, *dy)) : "not checked");
    rep.R_upper = r_upper_from(m, cfg, *up);
  } catch (const NumericError& e) {
    add("s*, y* attractivity", false, e.what());
    up_ok = false;
  }

  std::optional<LowerAttractors> lo;
  bool lo_ok = false;
  try {
    lo = compute_lower_attractors(m, cfg);
    std::optional<double> d2, d1;
    bool verified = true;
    if (cfg.verify) {
      auto v2 = verify_attractivity<2>(build_sp2(m, 0.0, cfg.vrho, cfg.shift), lo->sp2, default_probes<2>(), ctl);
      auto v1 = verify_attractivity<2>(build_sp1(m, 0.0, cfg.vrho, lo->sp2, cfg.shift), lo->sp1,
                                       default_probes<2>(), ctl);
      d2 = v2.max_deviation;
      d1 = v1.max_deviation;
      verified = v2.passed && v1.passed;
    }
    rep.attractors.push_back(summarize("upper family (x2*, z2*)", lo->sp2, d2));
    rep.attractors.push_back(summarize("lower family (x1*, z1*)", lo->sp1, d1));
    lo_ok = add("auxiliary family attractivity", verified,
                cfg.verify ? "max deviation " + fmt(std::max(*d1, *d2)) : "not checked");
    rep.R_lower = r_lower_from(m, cfg, *lo);
  } catch (const NumericError& e) {
    add("auxiliary family attractivity", false, e.what());
  }

  if (m.common_period && up && lo) {
    try {
      auto per = r_per_pair_from(m, cfg, *up, *lo);
      rep.R_lower_per = per.lower;
      rep.R_upper_per = per.upper;
    } catch (const NumericError& e) {
      rep.reasons.push_back(std::string("periodic means unavailable: ") + e.what());
    }
  }

  bool chain_ok = false;
  try {
    rep.absorbing = absorbing_bound(m, cfg.delta, cfg.L);
    auto chain = refined_chain(m, rep.absorbing->L, cfg.depth, ctl,
                               up ? std::optional(up->s_star) : std::nullopt,
                               up ? std::optional(up->y_star) : std::nullopt);
    rep.refined_uppers = r_upper_refined_from(m, cfg, chain);
    chain_ok = add("refined chain", true, "depth " + std::to_string(cfg.depth));
  } catch (const NoTemplateMatch& e) {
    add("refined chain", false, std::string("no absorbing bound: ") + e.what());
  } catch (const NoConvergence& e) {
    add("refined chain", false, std::string(e.what()) + " (stage " + std::to_string(e.stage()) + ")");
  } catch (const NumericError& e) {
    add("refined chain", false, e.what());
  }

  const bool extinct_basic = standing && ext_basic && up_ok && rep.R_upper && *rep.R_upper < 0.0;
  double min_refined = HUGE_VAL;
  for (double r : rep.refined_uppers) min_refined = std::min(min_refined, r);
  const bool extinct_ref = standing && ext_refined && up_ok && chain_ok && min_refined < 0.0;
  const bool persistent = standing && lo_ok && rep.R_lower && *rep.R_lower > 0.0;

  if ((extinct_basic || extinct_ref) && persistent) {
    rep.classification = Classification::Inconclusive;
    rep.reasons.push_back("extinction and persistence criteria both fired");
  } else if (extinct_basic || extinct_ref) {
    rep.classification = Classification::Extinct;
    rep.reasons.push_back(extinct_basic ? "R_upper < 0" : "refined upper threshold < 0");
  } else if (persistent) {
    rep.classification = Classification::Persistent;
    rep.reasons.push_back("R_lower > 0");
  } else {
    rep.classification = Classification::Inconclusive;
    if (!standing) rep.reasons.push_back("standing hypotheses failed");
    if (rep.R_upper && *rep.R_upper < 0.0 && !ext_basic) rep.reasons.push_back("R_upper < 0 but side conditions fail");
    if (rep.R_lower && *rep.R_lower <= 0.0 && rep.R_upper && *rep.R_upper >= 0.0)
      rep.reasons.push_back("R_lower <= 0 <= R_upper: thresholds are not sharp here");
    if (!up_ok || !lo_ok) rep.reasons.push_back("attractor stage failed");
  }
  return rep;
}

}  // namespace ecoepi
