#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace ecoepi {

/// Which density appears in the numerator k*X^alpha of a response.
/// Predation on susceptibles (f) uses S; predation on infectives (g) uses P.
enum class Axis { S, P };

inline const char* axis_name(Axis a) { return a == Axis::S ? "S" : "P"; }

namespace response {

struct Zero {};
struct Identity {
  Axis axis = Axis::S;
};
struct HollingI {
  double k = 1.0;
  Axis axis = Axis::S;
};
/// k X / (1 + m (S + I))
struct HollingII {
  double k = 1.0;
  double m = 1.0;
  Axis axis = Axis::S;
};
/// k X^alpha / (1 + m (S + I))
struct HollingIII {
  double k = 1.0;
  double m = 1.0;
  double alpha = 2.0;
  Axis axis = Axis::S;
};
/// k X / (a + b (S + I) + c (S + I)^2)
struct HollingIV {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double k = 1.0;
  Axis axis = Axis::S;
};
/// k X / (a + b (S + I) + c P)
struct BeddingtonDeAngelis {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double k = 1.0;
  Axis axis = Axis::S;
};
/// k X / (a + b (S + I) + c P + d (S + I) P)
struct CrowleyMartin {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 1.0;
  double k = 1.0;
  Axis axis = Axis::S;
};
/// k X / (m P + S + I); zero at the origin.
struct RatioDependent {
  double k = 1.0;
  double m = 1.0;
  Axis axis = Axis::S;
};
/// k X^alpha / (d0 + d_prey (S + I) + d_pred P + d_prey2 (S + I)^2 + d_cross (S + I) P)
struct GeneralRatio {
  double k = 1.0;
  double alpha = 1.0;
  double d0 = 1.0;
  double d_prey = 0.0;
  double d_pred = 0.0;
  double d_prey2 = 0.0;
  double d_cross = 0.0;
  Axis axis = Axis::S;
};
/// k S P. Not a catalog response: it violates the monotonicity hypotheses
/// when used for g and exists to exercise the validator.
struct Product {
  double k = 1.0;
};

}  // namespace response

/// Functional response of predator to prey, f(S, I, P) or g(S, I, P).
class FunctionalResponse {
 public:
  using Form = std::variant<response::Zero, response::Identity, response::HollingI,
                            response::HollingII, response::HollingIII, response::HollingIV,
                            response::BeddingtonDeAngelis, response::CrowleyMartin,
                            response::RatioDependent, response::GeneralRatio,
                            response::Product>;

  FunctionalResponse() : form_(response::Zero{}) {}

  template <typename T>
    requires std::is_constructible_v<Form, T>
  FunctionalResponse(T form) : form_(std::move(form)) {  // NOLINT: implicit by design of the catalog
    validate();
  }

  const Form& form() const noexcept { return form_; }

  /// Evaluate without the domain check; negative inputs are clamped to 0.
  /// Used inside right-hand sides where Runge-Kutta stages may undershoot.
  double value_clamped(double S, double I, double P) const {
    return eval(S > 0.0 ? S : 0.0, I > 0.0 ? I : 0.0, P > 0.0 ? P : 0.0);
  }

  double operator()(double S, double I, double P) const {
    if (!(S >= 0.0) || !(I >= 0.0) || !(P >= 0.0))
      throw std::domain_error("functional response evaluated at negative density");
    return eval(S, I, P);
  }

  bool is_zero() const noexcept { return std::holds_alternative<response::Zero>(form_); }

  /// True when the value does not depend on I (checked structurally).
  bool independent_of_I() const {
    using namespace response;
    return std::visit(
        [](const auto& f) -> bool {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Zero> || std::is_same_v<F, Product>) return true;
          else if constexpr (std::is_same_v<F, Identity> || std::is_same_v<F, HollingI>)
            return true;
          else return false;
        },
        form_);
  }

  /// HollingIII with exponent below one has an unbounded derivative at 0.
  bool locally_lipschitz() const {
    using namespace response;
    if (const auto* h = std::get_if<HollingIII>(&form_)) return h->alpha >= 1.0;
    if (const auto* g = std::get_if<GeneralRatio>(&form_)) return g->alpha >= 1.0;
    return true;
  }

  /// Supremum over the closed positive octant, when finite and known in closed form.
  std::optional<double> supremum() const;

  /// Gain k such that the response is bounded by k*S (f-type linear responses).
  std::optional<double> linear_gain_in_S() const {
    using namespace response;
    if (std::holds_alternative<Zero>(form_)) return 0.0;
    if (const auto* i = std::get_if<Identity>(&form_))
      return i->axis == Axis::S ? std::optional<double>(1.0) : std::nullopt;
    if (const auto* h = std::get_if<HollingI>(&form_))
      return h->axis == Axis::S ? std::optional<double>(h->k) : std::nullopt;
    return std::nullopt;
  }

  /// Gain k such that the response is bounded by k*P (g-type linear responses).
  std::optional<double> linear_gain_in_P() const {
    using namespace response;
    if (std::holds_alternative<Zero>(form_)) return 0.0;
    if (const auto* i = std::get_if<Identity>(&form_))
      return i->axis == Axis::P ? std::optional<double>(1.0) : std::nullopt;
    if (const auto* h = std::get_if<HollingI>(&form_))
      return h->axis == Axis::P ? std::optional<double>(h->k) : std::nullopt;
    return std::nullopt;
  }

  std::string kind_name() const {
    static const char* names[] = {"zero",     "identity",        "holling_i",
                                  "holling_ii", "holling_iii",   "holling_iv",
                                  "beddington_deangelis", "crowley_martin", "ratio_dependent",
                                  "general_ratio", "product"};
    return names[form_.index()];
  }

 private:
  static double numerator(Axis axis, double S, double P, double k, double alpha = 1.0) {
    const double x = axis == Axis::S ? S : P;
    return alpha == 1.0 ? k * x : k * std::pow(x, alpha);
  }

  // Value 0 where the denominator vanishes (origin of ratio-type forms).
  static double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

  double eval(double S, double I, double P) const {
    using namespace response;
    const double prey = S + I;
    return std::visit(
        [&](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Zero>) {
            return 0.0;
          } else if constexpr (std::is_same_v<F, Identity>) {
            return f.axis == Axis::S ? S : P;
          } else if constexpr (std::is_same_v<F, HollingI>) {
            return numerator(f.axis, S, P, f.k);
          } else if constexpr (std::is_same_v<F, HollingII>) {
            return numerator(f.axis, S, P, f.k) / (1.0 + f.m * prey);
          } else if constexpr (std::is_same_v<F, HollingIII>) {
            return numerator(f.axis, S, P, f.k, f.alpha) / (1.0 + f.m * prey);
          } else if constexpr (std::is_same_v<F, HollingIV>) {
            return numerator(f.axis, S, P, f.k) / (f.a + f.b * prey + f.c * prey * prey);
          } else if constexpr (std::is_same_v<F, BeddingtonDeAngelis>) {
            return numerator(f.axis, S, P, f.k) / (f.a + f.b * prey + f.c * P);
          } else if constexpr (std::is_same_v<F, CrowleyMartin>) {
            return numerator(f.axis, S, P, f.k) / (f.a + f.b * prey + f.c * P + f.d * prey * P);
          } else if constexpr (std::is_same_v<F, RatioDependent>) {
            return ratio(numerator(f.axis, S, P, f.k), f.m * P + S + I);
          } else if constexpr (std::is_same_v<F, GeneralRatio>) {
            const double den = f.d0 + f.d_prey * prey + f.d_pred * P + f.d_prey2 * prey * prey +
                               f.d_cross * prey * P;
            return ratio(numerator(f.axis, S, P, f.k, f.alpha), den);
          } else {
            return f.k * S * P;
          }
        },
        form_);
  }

  void validate() const {
    using namespace response;
    auto nonneg = [](double v, const char* what) {
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument(std::string("response parameter ") + what +
                                    " must be finite and >= 0");
    };
    auto positive = [](double v, const char* what) {
      if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string("response parameter ") + what + " must be > 0");
    };
    std::visit(
        [&](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, HollingI> || std::is_same_v<F, Product>) {
            nonneg(f.k, "k");
          } else if constexpr (std::is_same_v<F, HollingII>) {
            nonneg(f.k, "k");
            nonneg(f.m, "m");
          } else if constexpr (std::is_same_v<F, HollingIII>) {
            nonneg(f.k, "k");
            nonneg(f.m, "m");
            positive(f.alpha, "alpha");
          } else if constexpr (std::is_same_v<F, HollingIV> ||
                               std::is_same_v<F, BeddingtonDeAngelis>) {
            nonneg(f.k, "k");
            positive(f.a, "a");
            nonneg(f.b, "b");
            nonneg(f.c, "c");
          } else if constexpr (std::is_same_v<F, CrowleyMartin>) {
            nonneg(f.k, "k");
            positive(f.a, "a");
            nonneg(f.b, "b");
            nonneg(f.c, "c");
            nonneg(f.d, "d");
          } else if constexpr (std::is_same_v<F, RatioDependent>) {
            nonneg(f.k, "k");
            positive(f.m, "m");
          } else if constexpr (std::is_same_v<F, GeneralRatio>) {
            nonneg(f.k, "k");
            positive(f.alpha, "alpha");
            nonneg(f.d0, "d0");
            nonneg(f.d_prey, "d_prey");
            nonneg(f.d_pred, "d_pred");
            nonneg(f.d_prey2, "d_prey2");
            nonneg(f.d_cross, "d_cross");
            if (!(f.d0 > 0.0 || (f.d_prey > 0.0 && f.d_pred > 0.0)))
              throw std::invalid_argument(
                  "general_ratio denominator must be positive away from the origin");
          }
        },
        form_);
  }

  Form form_;
};

inline std::optional<double> FunctionalResponse::supremum() const {
  using namespace response;
  return std::visit(
      [](const auto& f) -> std::optional<double> {
        using F = std::decay_t<decltype(f)>;
        const bool on_s = [&] {
          if constexpr (requires { f.axis; }) return f.axis == Axis::S;
          else return true;
        }();
        if constexpr (std::is_same_v<F, Zero>) {
          return 0.0;
        } else if constexpr (std::is_same_v<F, HollingII>) {
          if (on_s && f.m > 0.0) return f.k / f.m;
          return std::nullopt;
        } else if constexpr (std::is_same_v<F, HollingIII>) {
          if (!on_s || f.m <= 0.0 || f.alpha > 1.0) return std::nullopt;
          if (f.alpha == 1.0) return f.k / f.m;
          const double s = f.alpha / (f.m * (1.0 - f.alpha));
          return f.k * std::pow(s, f.alpha) / (1.0 + f.m * s);
        } else if constexpr (std::is_same_v<F, HollingIV>) {
          if (!on_s) return std::nullopt;
          const double den = f.b + 2.0 * std::sqrt(f.a * f.c);
          return den > 0.0 ? std::optional<double>(f.k / den) : std::nullopt;
        } else if constexpr (std::is_same_v<F, BeddingtonDeAngelis> ||
                             std::is_same_v<F, CrowleyMartin>) {
          const double den = on_s ? f.b : f.c;
          return den > 0.0 ? std::optional<double>(f.k / den) : std::nullopt;
        } else if constexpr (std::is_same_v<F, RatioDependent>) {
          return on_s ? f.k : f.k / f.m;
        } else if constexpr (std::is_same_v<F, GeneralRatio>) {
          if (f.alpha != 1.0) return std::nullopt;
          const double den = on_s ? f.d_prey : f.d_pred;
          return den > 0.0 ? std::optional<double>(f.k / den) : std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      form_);
}

inline double eval_response(const FunctionalResponse& fr, double S, double I, double P) {
  return fr(S, I, P);
}

}  // namespace ecoepi
