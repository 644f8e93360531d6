#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecoepi/integrator.hpp"
#include "ecoepi/json_format.hpp"
#include "ecoepi/model.hpp"
#include "ecoepi/thresholds.hpp"

namespace ecoepi {

enum class ParameterSource { Prose, Displayed };

inline ParameterSource parse_parameter_source(const std::string& s) {
  if (s == "prose") return ParameterSource::Prose;
  if (s == "displayed") return ParameterSource::Displayed;
  throw std::invalid_argument("parameter source must be 'prose' or 'displayed'");
}

namespace detail {

inline TimeCoefficient example_beta(double beta0) {
  return TimeCoefficient::sinusoid(beta0, 0.7, 0.0, 1.0);
}
inline TimeCoefficient example_eta() { return TimeCoefficient::sinusoid(0.7, 0.7, std::numbers::pi, 1.0); }
inline void check_beta0(double beta0) {
  if (!(beta0 >= 0.0) || !std::isfinite(beta0)) throw std::invalid_argument("beta0 must be >= 0");
}

}  // namespace detail


/// No predation on susceptibles, decaying predator.
inline EcoEpiModel example1(double beta0) {
  detail::check_beta0(beta0);
  return EcoEpiModel{"example1",
                     TimeCoefficient::constant(0.0),
                     detail::example_beta(beta0),
                     detail::example_eta(),
                     TimeCoefficient::constant(0.1),
                     TimeCoefficient::constant(0.0),
                     TimeCoefficient::constant(0.9),
                     response::Zero{},
                     response::Identity{Axis::P},
                     SusceptibleVitalDynamics::logistic(TimeCoefficient::constant(0.7), TimeCoefficient::constant(0.6)),
                     PredatorVitalRate::decay(TimeCoefficient::constant(0.2), TimeCoefficient::constant(0.3)),
                     1.0};
}

/// Mass-action predation on susceptibles with logistic predator.
inline EcoEpiModel example2(double beta0) {
  detail::check_beta0(beta0);
  return EcoEpiModel{"example2",
                     TimeCoefficient::constant(0.9),
                     detail::example_beta(beta0),
                     detail::example_eta(),
                     TimeCoefficient::constant(0.1),
                     TimeCoefficient::constant(0.1),
                     TimeCoefficient::constant(0.9),
                     response::Identity{Axis::S},
                     response::Identity{Axis::P},
                     SusceptibleVitalDynamics::logistic(TimeCoefficient::constant(0.7), TimeCoefficient::constant(0.6)),
                     PredatorVitalRate::growth(TimeCoefficient::constant(0.2), TimeCoefficient::constant(0.6)),
                     1.0};
}

/// Saturating predation S/(2 + S + I).
inline EcoEpiModel example3(double beta0, ParameterSource src = ParameterSource::Prose) {
  detail::check_beta0(beta0);
  const bool prose = src == ParameterSource::Prose;
  return EcoEpiModel{prose ? "example3" : "example3-displayed",
                     TimeCoefficient::constant(0.9),
                     detail::example_beta(beta0),
                     detail::example_eta(),
                     TimeCoefficient::constant(0.1),
                     TimeCoefficient::constant(prose ? 0.8 : 1.0),
                     TimeCoefficient::constant(prose ? 0.9 : 6.0 / 7.0),
                     response::GeneralRatio{1.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, Axis::S},
                     response::Identity{Axis::P},
                     SusceptibleVitalDynamics::logistic(TimeCoefficient::constant(0.7), TimeCoefficient::constant(0.6)),
                     PredatorVitalRate::growth(TimeCoefficient::constant(0.2), TimeCoefficient::constant(0.6)),
                     1.0};
}

/// Ratio-dependent predation S/(2P + S + I) with affine susceptible recruitment.
inline EcoEpiModel example4(double beta0, ParameterSource src = ParameterSource::Prose) {
  detail::check_beta0(beta0);
  const bool prose = src == ParameterSource::Prose;
  return EcoEpiModel{prose ? "example4" : "example4-displayed",
                     TimeCoefficient::constant(0.9),
                     detail::example_beta(beta0),
                     detail::example_eta(),
                     TimeCoefficient::constant(0.1),
                     TimeCoefficient::constant(prose ? 0.8 : 1.0),
                     TimeCoefficient::constant(prose ? 0.9 : 6.0 / 7.0),
                     response::RatioDependent{1.0, 2.0, Axis::S},
                     response::Identity{Axis::P},
                     SusceptibleVitalDynamics::affine(TimeCoefficient::constant(3.0), TimeCoefficient::constant(0.6)),
                     PredatorVitalRate::growth(TimeCoefficient::constant(prose ? 0.2 : 0.8), TimeCoefficient::constant(0.6)),
                     1.0};
}

inline EcoEpiModel example_model(int which, double beta0,
                                 ParameterSource src = ParameterSource::Prose) {
  switch (which) {
    case 1: return example1(beta0);
    case 2: return example2(beta0);
    case 3: return example3(beta0, src);
    case 4: return example4(beta0, src);
    default: throw std::invalid_argument("example number must be 1..4");
  }
}

inline std::vector<State<3>> default_initial_conditions() {
  return {{1.0, 0.5, 0.1}, {0.1, 0.2, 1.0}, {0.5, 0.5, 0.5}};
}

enum class EmpiricalClass { Extinct, Persistent, Undetermined };

inline const char* empirical_name(EmpiricalClass c) {
  switch (c) {
    case EmpiricalClass::Extinct: return "Extinct";
    case EmpiricalClass::Persistent: return "Persistent";
    default: return "Undetermined";
  }
}

struct CampaignOptions {
  double horizon = 200.0;
  double tail_fraction = 0.25;
  double extinct_max_I = 1e-4;
  double persistent_min_I = 1e-3;
  double tail_sample_step = 0.01;
  IntegrationControl integration{};
  bool thresholds = true;
  bool keep_trajectories = false;
};

struct IcOutcome {
  State<3> ic{};
  bool ok = false;
  std::string error;
  double tail_min_I = 0.0;  // est. liminf I
  double tail_max_I = 0.0;  // est. limsup I
  double tail_max_SI = 0.0;
  double tail_max_P = 0.0;
  double min_component = 0.0;  // smallest sampled S, I or P over the whole run
  State<3> final_state{};
  EmpiricalClass empirical = EmpiricalClass::Undetermined;
  std::optional<Trajectory<3>> trajectory;
};

struct CampaignResult {
  std::string model;
  std::vector<IcOutcome> runs;
  std::optional<ThresholdReport> report;
  EmpiricalClass empirical = EmpiricalClass::Undetermined;
  bool agreement = false;
};

inline IcOutcome simulate_ic(const EcoEpiModel& m, const State<3>& ic, const CampaignOptions& opt) {
  IcOutcome out;
  out.ic = ic;
  try {
    auto tr = integrate<3>(full_field(m), ic, 0.0, opt.horizon, opt.integration);
    const double t_tail = opt.horizon * (1.0 - opt.tail_fraction);
    out.tail_min_I = HUGE_VAL;
    out.tail_max_I = -HUGE_VAL;
    out.min_component = HUGE_VAL;
    auto observe = [&](double t, const State<3>& y) {
      out.min_component = std::min({out.min_component, y[0], y[1], y[2]});
      if (t < t_tail) return;
      out.tail_min_I = std::min(out.tail_min_I, y[1]);
      out.tail_max_I = std::max(out.tail_max_I, y[1]);
      out.tail_max_SI = std::max(out.tail_max_SI, y[0] + y[1]);
      out.tail_max_P = std::max(out.tail_max_P, y[2]);
    };
    for (std::size_t k = 0; k < tr.knot_count(); ++k) observe(tr.times()[k], tr.states()[k]);
    const auto n = static_cast<std::size_t>(std::ceil((opt.horizon - t_tail) / opt.tail_sample_step));
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = std::min(t_tail + opt.tail_sample_step * static_cast<double>(i), opt.horizon);
      observe(t, tr.sample(t));
    }
    out.final_state = tr.back();
    if (out.tail_max_I < opt.extinct_max_I) out.empirical = EmpiricalClass::Extinct;
    else if (out.tail_min_I > opt.persistent_min_I) out.empirical = EmpiricalClass::Persistent;
    out.ok = true;
    if (opt.keep_trajectories) out.trajectory = std::move(tr);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

/// Simulate every initial condition concurrently, summarize the tails and
/// compare with the threshold classification.
inline CampaignResult run_campaign(const EcoEpiModel& m, const std::vector<State<3>>& ics,
                                   const ThresholdConfig& cfg = {}, const CampaignOptions& opt = {}) {
  for (const auto& ic : ics)
    for (double v : ic)
      if (!(v >= 0.0)) throw std::invalid_argument("initial conditions must be nonnegative");
  if (!(opt.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  CampaignResult res;
  res.model = m.name;
  std::vector<std::future<IcOutcome>> jobs;
  for (const auto& ic : ics) jobs.push_back(std::async(std::launch::async, simulate_ic, std::cref(m), ic, std::cref(opt)));
  if (opt.thresholds) res.report = classify(m, cfg);
  for (auto& j : jobs) res.runs.push_back(j.get());

  bool all_ext = !res.runs.empty(), all_per = !res.runs.empty();
  for (const auto& r : res.runs) {
    all_ext = all_ext && r.ok && r.empirical == EmpiricalClass::Extinct;
    all_per = all_per && r.ok && r.empirical == EmpiricalClass::Persistent;
  }
  res.empirical = all_ext ? EmpiricalClass::Extinct
                  : all_per ? EmpiricalClass::Persistent
                            : EmpiricalClass::Undetermined;
  if (res.report) {
    const auto c = res.report->classification;
    res.agreement = (c == Classification::Extinct && all_ext) || (c == Classification::Persistent && all_per);
  }
  return res;
}

inline CampaignResult run_campaign(const EcoEpiModel& m, const ThresholdConfig& cfg = {},
                                   const CampaignOptions& opt = {}) {
  return run_campaign(m, default_initial_conditions(), cfg, opt);
}

/// One published scenario: example number, transmission scale and the
/// printed threshold that supports its conclusion.
struct Scenario {
  int example = 0;
  double beta0 = 0.0;
  bool extinction = true;  // published conclusion
  double printed = 0.0;    // printed R_upper (extinction) or R_lower (persistence)
  std::optional<double> printed_per;
};

inline std::vector<Scenario> paper_scenarios() {
  return {{1, 0.01, true, -0.15, std::nullopt}, {1, 0.3, false, 1.3, std::nullopt},
          {2, 0.1, true, -0.217, 0.35},         {2, 0.8, false, 0.167, 1.483},
          {3, 0.1, true, -0.217, std::nullopt}, {3, 0.9, false, 0.757, std::nullopt},
          {4, 0.01, true, -0.283, std::nullopt}, {4, 0.3, false, 0.073, std::nullopt}};
}

struct ReproductionRow {
  Scenario scenario;
  std::string quantity;  // "R_upper" or "R_lower"
  std::optional<double> computed;
  std::optional<double> computed_per;
  bool sign_ok = false;
  bool value_ok = false;
  Classification classification = Classification::Inconclusive;
  EmpiricalClass empirical = EmpiricalClass::Undetermined;
  bool empirical_ok = false;
  std::vector<std::string> flags;
  std::string error;
};

struct ReproductionReport {
  std::vector<ReproductionRow> rows;
  double value_tolerance = 0.005;

  bool all_signs_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.sign_ok; });
  }

  json to_json() const {
    json j;
    j["value_tolerance"] = value_tolerance;
    j["rows"] = json::array();
    for (const auto& r : rows) {
      json e{{"example", r.scenario.example},
             {"beta0", r.scenario.beta0},
             {"conclusion", r.scenario.extinction ? "extinction" : "persistence"},
             {"quantity", r.quantity},
             {"printed", r.scenario.printed},
             {"computed", r.computed ? json(*r.computed) : json(nullptr)},
             {"printed_per", r.scenario.printed_per ? json(*r.scenario.printed_per) : json(nullptr)},
             {"computed_per", r.computed_per ? json(*r.computed_per) : json(nullptr)},
             {"sign_ok", r.sign_ok},
             {"value_ok", r.value_ok},
             {"classification", classification_name(r.classification)},
             {"empirical", empirical_name(r.empirical)},
             {"empirical_ok", r.empirical_ok},
             {"flags", r.flags}};
      if (!r.error.empty()) e["error"] = r.error;
      j["rows"].push_back(e);
    }
    return j;
  }

  std::string to_table() const {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-6s %-8s %10s %10s %-5s %-6s %-13s %-13s %s\n", "ex", "beta0",
                  "quantity", "computed", "printed", "sign", "value", "theory", "simulation", "flags");
    os << buf;
    for (const auto& r : rows) {
      std::string flags;
      for (const auto& f : r.flags) flags += (flags.empty() ? "" : ",") + f;
      std::snprintf(buf, sizeof buf, "%-4d %-6g %-8s %10.4f %10.4f %-5s %-6s %-13s %-13s %s\n",
                    r.scenario.example, r.scenario.beta0, r.quantity.c_str(),
                    r.computed.value_or(std::nan("")), r.scenario.printed, r.sign_ok ? "ok" : "FAIL",
                    r.value_ok ? "ok" : "flag", classification_name(r.classification),
                    empirical_name(r.empirical), flags.c_str());
      os << buf;
    }
    return os.str();
  }
};

inline ReproductionRow reproduce_scenario(const Scenario& sc, const ThresholdConfig& cfg,
                                          const CampaignOptions& opt, double tol) {
  ReproductionRow row;
  row.scenario = sc;
  row.quantity = sc.extinction ? "R_upper" : "R_lower";
  try {
    const auto m = example_model(sc.example, sc.beta0);
    auto camp = run_campaign(m, cfg, opt);
    const auto& rep = *camp.report;
    row.classification = rep.classification;
    row.computed = sc.extinction ? rep.R_upper : rep.R_lower;
    row.computed_per = sc.extinction ? rep.R_upper_per : rep.R_lower_per;
    if (row.computed) {
      row.sign_ok = sc.extinction ? *row.computed < 0.0 : *row.computed > 0.0;
      row.value_ok = std::abs(*row.computed - sc.printed) <= tol;
    }
    if (!row.value_ok) row.flags.push_back("value_mismatch");
    if (!row.sign_ok) row.flags.push_back("sign_mismatch");
    if (sc.printed_per && row.computed_per && std::abs(*row.computed_per - *sc.printed_per) > 2 * tol)
      row.flags.push_back("periodic_value_mismatch");
    const auto expected = sc.extinction ? Classification::Extinct : Classification::Persistent;
    if (rep.classification != expected) row.flags.push_back("classification_mismatch");
    row.empirical = camp.empirical;
    row.empirical_ok = camp.empirical == (sc.extinction ? EmpiricalClass::Extinct : EmpiricalClass::Persistent);
    if (!row.empirical_ok) row.flags.push_back("simulation_mismatch");
  } catch (const std::exception& e) {
    row.error = e.what();
    row.flags.push_back("error");
  }
  return row;
}

/// Run the eight published scenarios concurrently; rows keep scenario order.
inline ReproductionReport reproduce_paper(const ThresholdConfig& cfg = {}, const CampaignOptions& opt = {},
                                          double tol = 0.005) {
  ReproductionReport rep;
  rep.value_tolerance = tol;
  std::vector<std::future<ReproductionRow>> jobs;
  for (const auto& sc : paper_scenarios())
    jobs.push_back(std::async(std::launch::async, reproduce_scenario, sc, std::cref(cfg), std::cref(opt), tol));
  for (auto& j : jobs) rep.rows.push_back(j.get());
  return rep;
}

}  // namespace ecoepi
