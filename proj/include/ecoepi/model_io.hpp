#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecoepi/json_format.hpp"
#include "ecoepi/model.hpp"

namespace ecoepi {

/// Malformed or invalid model document.
class ModelFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace io {

inline void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ModelFormatError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ModelFormatError(where + ": unknown key '" + k + "'");
}

inline double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ModelFormatError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ModelFormatError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

inline const json& member(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ModelFormatError(where + ": missing '" + key + "'");
  return j.at(key);
}

template <typename Fn>
auto guarded(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ModelFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelFormatError(where + ": " + e.what());
  }
}

// Named numeric parameters of each response form.
inline std::vector<std::pair<const char*, double*>> params(response::Zero&) { return {}; }
inline std::vector<std::pair<const char*, double*>> params(response::Identity&) { return {}; }
inline std::vector<std::pair<const char*, double*>> params(response::HollingI& f) { return {{"k", &f.k}}; }
inline std::vector<std::pair<const char*, double*>> params(response::HollingII& f) {
  return {{"k", &f.k}, {"m", &f.m}};
}
inline std::vector<std::pair<const char*, double*>> params(response::HollingIII& f) {
  return {{"k", &f.k}, {"m", &f.m}, {"alpha", &f.alpha}};
}
inline std::vector<std::pair<const char*, double*>> params(response::HollingIV& f) {
  return {{"a", &f.a}, {"b", &f.b}, {"c", &f.c}, {"k", &f.k}};
}
inline std::vector<std::pair<const char*, double*>> params(response::BeddingtonDeAngelis& f) {
  return {{"a", &f.a}, {"b", &f.b}, {"c", &f.c}, {"k", &f.k}};
}
inline std::vector<std::pair<const char*, double*>> params(response::CrowleyMartin& f) {
  return {{"a", &f.a}, {"b", &f.b}, {"c", &f.c}, {"d", &f.d}, {"k", &f.k}};
}
inline std::vector<std::pair<const char*, double*>> params(response::RatioDependent& f) {
  return {{"k", &f.k}, {"m", &f.m}};
}
inline std::vector<std::pair<const char*, double*>> params(response::GeneralRatio& f) {
  return {{"k", &f.k},         {"alpha", &f.alpha},     {"d0", &f.d0},          {"d_prey", &f.d_prey},
          {"d_pred", &f.d_pred}, {"d_prey2", &f.d_prey2}, {"d_cross", &f.d_cross}};
}
inline std::vector<std::pair<const char*, double*>> params(response::Product& f) { return {{"k", &f.k}}; }

template <typename F>
std::optional<F> parse_form(const json& j, const std::string& kind, const std::string& want,
                            const std::string& where) {
  if (kind != want) return std::nullopt;
  F f{};
  std::set<std::string> allowed{"kind"};
  if constexpr (requires { f.axis; }) {
    allowed.insert("axis");
    if (j.contains("axis")) {
      const auto a = j.at("axis");
      if (a == "S") f.axis = Axis::S;
      else if (a == "P") f.axis = Axis::P;
      else throw ModelFormatError(where + ".axis: expected \"S\" or \"P\"");
    }
  }
  for (auto [name, ptr] : params(f)) {
    allowed.insert(name);
    if (j.contains(name)) *ptr = number(j, name, where);
  }
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ModelFormatError(where + ": unknown key '" + k + "' for " + kind);
  return f;
}

}  // namespace io

inline json coefficient_to_json(const TimeCoefficient& c) {
  return std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TimeCoefficient::Constant>)
          return {{"kind", "constant"}, {"value", f.value}};
        else if constexpr (std::is_same_v<F, TimeCoefficient::Sinusoid>)
          return {{"kind", "sinusoid"}, {"base", f.base}, {"rel_amplitude", f.rel_amplitude},
                  {"phase", f.phase},   {"period", f.period}};
        else
          return {{"kind", "table"}, {"times", f.times}, {"values", f.values}};
      },
      c.form());
}

/// A bare number is shorthand for a constant coefficient.
inline TimeCoefficient coefficient_from_json(const json& j, const std::string& where) {
  return io::guarded(where, [&]() -> TimeCoefficient {
    if (j.is_number()) return TimeCoefficient::constant(j.get<double>());
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
      throw ModelFormatError(where + ": expected a number or an object with a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
      io::require_keys(j, where, {"kind", "value"});
      return TimeCoefficient::constant(io::number(j, "value", where));
    }
    if (kind == "sinusoid") {
      io::require_keys(j, where, {"kind", "base", "rel_amplitude", "phase", "period"});
      return TimeCoefficient::sinusoid(io::number(j, "base", where), io::number(j, "rel_amplitude", where),
                                       j.contains("phase") ? io::number(j, "phase", where) : 0.0,
                                       j.contains("period") ? io::number(j, "period", where) : 1.0);
    }
    if (kind == "table") {
      io::require_keys(j, where, {"kind", "times", "values"});
      return TimeCoefficient::table(io::member(j, "times", where).get<std::vector<double>>(),
                                    io::member(j, "values", where).get<std::vector<double>>());
    }
    throw ModelFormatError(where + ": unknown coefficient kind '" + kind + "'");
  });
}

inline json response_to_json(const FunctionalResponse& r) {
  return std::visit(
      [&](auto f) -> json {
        json j{{"kind", r.kind_name()}};
        if constexpr (requires { f.axis; }) j["axis"] = axis_name(f.axis);
        for (auto [name, ptr] : io::params(f)) j[name] = *ptr;
        return j;
      },
      r.form());
}

inline FunctionalResponse response_from_json(const json& j, const std::string& where) {
  return io::guarded(where, [&]() -> FunctionalResponse {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
      throw ModelFormatError(where + ": expected an object with a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    using namespace response;
    if (auto f = io::parse_form<Zero>(j, kind, "zero", where)) return *f;
    if (auto f = io::parse_form<Identity>(j, kind, "identity", where)) return *f;
    if (auto f = io::parse_form<HollingI>(j, kind, "holling_i", where)) return *f;
    if (auto f = io::parse_form<HollingII>(j, kind, "holling_ii", where)) return *f;
    if (auto f = io::parse_form<HollingIII>(j, kind, "holling_iii", where)) return *f;
    if (auto f = io::parse_form<HollingIV>(j, kind, "holling_iv", where)) return *f;
    if (auto f = io::parse_form<BeddingtonDeAngelis>(j, kind, "beddington_deangelis", where)) return *f;
    if (auto f = io::parse_form<CrowleyMartin>(j, kind, "crowley_martin", where)) return *f;
    if (auto f = io::parse_form<RatioDependent>(j, kind, "ratio_dependent", where)) return *f;
    if (auto f = io::parse_form<GeneralRatio>(j, kind, "general_ratio", where)) return *f;
    if (auto f = io::parse_form<Product>(j, kind, "product", where)) return *f;
    throw ModelFormatError(where + ": unknown response kind '" + kind + "'");
  });
}

inline json model_to_json(const EcoEpiModel& m) {
  json j;
  j["name"] = m.name;
  j["common_period"] = m.common_period ? json(*m.common_period) : json(nullptr);
  j["a"] = coefficient_to_json(m.a);
  j["beta"] = coefficient_to_json(m.beta);
  j["eta"] = coefficient_to_json(m.eta);
  j["c"] = coefficient_to_json(m.c);
  j["gamma"] = coefficient_to_json(m.gamma);
  j["theta"] = coefficient_to_json(m.theta);
  j["f"] = response_to_json(m.f);
  j["g"] = response_to_json(m.g);
  if (const auto* af = std::get_if<SusceptibleVitalDynamics::AffineLinear>(&m.G.form())) {
    j["G"] = {{"kind", "affine_linear"}, {"Lambda", coefficient_to_json(af->Lambda)},
              {"mu", coefficient_to_json(af->mu)}};
  } else if (const auto* lf = std::get_if<SusceptibleVitalDynamics::LogisticFactor>(&m.G.form())) {
    j["G"] = {{"kind", "logistic_factor"}, {"growth", coefficient_to_json(lf->growth)},
              {"crowding", coefficient_to_json(lf->crowding)}};
  } else {
    throw std::invalid_argument("custom logistic vital dynamics cannot be serialized");
  }
  const bool grow = m.h.sign == PredatorVitalRate::Sign::Growth;
  j["h"] = grow ? json{{"kind", "growth"}, {"b", coefficient_to_json(m.h.intercept)},
                       {"r", coefficient_to_json(m.h.slope)}}
                : json{{"kind", "decay"}, {"delta1", coefficient_to_json(m.h.intercept)},
                       {"delta2", coefficient_to_json(m.h.slope)}};
  return j;
}

inline EcoEpiModel model_from_json(const json& j) {
  io::require_keys(j, "model", {"name", "common_period", "a", "beta", "eta", "c", "gamma", "theta", "f",
                                "g", "G", "h"});
  EcoEpiModel m;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ModelFormatError("model.name: expected a string");
    m.name = j.at("name").get<std::string>();
  }
  if (j.contains("common_period") && !j.at("common_period").is_null()) {
    const double w = io::number(j, "common_period", "model");
    if (!(w > 0.0)) throw ModelFormatError("model.common_period: must be > 0");
    m.common_period = w;
  }
  auto coef = [&](const char* key) { return coefficient_from_json(io::member(j, key, "model"), key); };
  m.a = coef("a");
  m.beta = coef("beta");
  m.eta = coef("eta");
  m.c = coef("c");
  m.gamma = coef("gamma");
  m.theta = coef("theta");
  m.f = response_from_json(io::member(j, "f", "model"), "f");
  m.g = response_from_json(io::member(j, "g", "model"), "g");

  const auto& G = io::member(j, "G", "model");
  const std::string Gk = G.is_object() && G.contains("kind") && G.at("kind").is_string()
                             ? G.at("kind").get<std::string>()
                             : "";
  if (Gk == "affine_linear") {
    io::require_keys(G, "G", {"kind", "Lambda", "mu"});
    m.G = SusceptibleVitalDynamics::affine(coefficient_from_json(io::member(G, "Lambda", "G"), "G.Lambda"),
                                           coefficient_from_json(io::member(G, "mu", "G"), "G.mu"));
  } else if (Gk == "logistic_factor") {
    io::require_keys(G, "G", {"kind", "growth", "crowding"});
    m.G = SusceptibleVitalDynamics::logistic(
        coefficient_from_json(io::member(G, "growth", "G"), "G.growth"),
        coefficient_from_json(io::member(G, "crowding", "G"), "G.crowding"));
  } else {
    throw ModelFormatError("G: kind must be 'affine_linear' or 'logistic_factor'");
  }

  const auto& h = io::member(j, "h", "model");
  const std::string hk = h.is_object() && h.contains("kind") && h.at("kind").is_string()
                             ? h.at("kind").get<std::string>()
                             : "";
  if (hk == "growth") {
    io::require_keys(h, "h", {"kind", "b", "r"});
    m.h = PredatorVitalRate::growth(coefficient_from_json(io::member(h, "b", "h"), "h.b"),
                                    coefficient_from_json(io::member(h, "r", "h"), "h.r"));
  } else if (hk == "decay") {
    io::require_keys(h, "h", {"kind", "delta1", "delta2"});
    m.h = PredatorVitalRate::decay(coefficient_from_json(io::member(h, "delta1", "h"), "h.delta1"),
                                   coefficient_from_json(io::member(h, "delta2", "h"), "h.delta2"));
  } else {
    throw ModelFormatError("h: kind must be 'growth' or 'decay'");
  }
  return m;
}

inline EcoEpiModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(std::string("model JSON: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("model JSON: ") + e.what());
  }
}

inline std::string serialize_model(const EcoEpiModel& m) { return dump_json(model_to_json(m)) + "\n"; }

inline EcoEpiModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace ecoepi
