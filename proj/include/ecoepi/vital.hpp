#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "ecoepi/coefficient.hpp"

namespace ecoepi {

/// Vital dynamics G(t, S) of the susceptible prey.
class SusceptibleVitalDynamics {
 public:
  /// G = Lambda(t) - mu(t) S
  struct AffineLinear {
    TimeCoefficient Lambda;
    TimeCoefficient mu;
  };
  /// G = k(t, S) S with k(t, S) = growth(t) - crowding(t) S
  struct LogisticFactor {
    TimeCoefficient growth;
    TimeCoefficient crowding;
  };
  /// G = k(t, S) S with a caller-supplied per-capita rate.
  /// k must be bounded above by k_upper, positive at S = 0, decreasing in S,
  /// and vanish at some S1(t) <= s1_upper. Not serializable.
  struct CustomLogistic {
    std::function<double(double, double)> k;
    double k_upper = 0.0;
    double s1_upper = 0.0;
    std::string label = "custom";
  };
  using Form = std::variant<AffineLinear, LogisticFactor, CustomLogistic>;

  SusceptibleVitalDynamics() = default;
  SusceptibleVitalDynamics(AffineLinear f) : form_(std::move(f)) {}  // NOLINT
  SusceptibleVitalDynamics(LogisticFactor f) : form_(std::move(f)) {}  // NOLINT
  SusceptibleVitalDynamics(CustomLogistic f) : form_(std::move(f)) {   // NOLINT
    if (!std::get<CustomLogistic>(form_).k)
      throw std::invalid_argument("custom logistic factor needs a rate function");
  }

  static SusceptibleVitalDynamics affine(TimeCoefficient Lambda, TimeCoefficient mu) {
    return AffineLinear{std::move(Lambda), std::move(mu)};
  }
  static SusceptibleVitalDynamics logistic(TimeCoefficient growth, TimeCoefficient crowding) {
    return LogisticFactor{std::move(growth), std::move(crowding)};
  }

  const Form& form() const noexcept { return form_; }
  bool is_affine() const noexcept { return std::holds_alternative<AffineLinear>(form_); }

  double operator()(double t, double S) const {
    if (const auto* a = std::get_if<AffineLinear>(&form_)) return a->Lambda(t) - a->mu(t) * S;
    return per_capita(t, S) * S;
  }

  /// k(t, S) for the logistic forms. Throws for the affine form, which has no factor.
  double per_capita(double t, double S) const {
    if (const auto* l = std::get_if<LogisticFactor>(&form_))
      return l->growth(t) - l->crowding(t) * S;
    if (const auto* c = std::get_if<CustomLogistic>(&form_)) return c->k(t, S);
    throw std::logic_error("affine vital dynamics has no per-capita factor");
  }

  std::string kind_name() const {
    switch (form_.index()) {
      case 0: return "affine_linear";
      case 1: return "logistic_factor";
      default: return "custom_logistic";
    }
  }

 private:
  Form form_{AffineLinear{}};
};

/// Per-capita predator rate h(t, P): either b(t) - r(t) P (growth) or
/// -(delta1(t) + delta2(t) P) (decay).
struct PredatorVitalRate {
  enum class Sign { Growth, Decay };

  Sign sign = Sign::Growth;
  TimeCoefficient intercept;  // b or delta1
  TimeCoefficient slope;      // r or delta2

  static PredatorVitalRate growth(TimeCoefficient b, TimeCoefficient r) {
    return {Sign::Growth, std::move(b), std::move(r)};
  }
  static PredatorVitalRate decay(TimeCoefficient delta1, TimeCoefficient delta2) {
    return {Sign::Decay, std::move(delta1), std::move(delta2)};
  }

  double operator()(double t, double P) const {
    if (sign == Sign::Growth) return intercept(t) - slope(t) * P;
    return -(intercept(t) + slope(t) * P);
  }
};

}  // namespace ecoepi
