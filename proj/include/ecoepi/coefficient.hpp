#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ecoepi {

/// A bounded, nonnegative, continuous time-varying model parameter.
///
/// Three forms are supported:
///   - constant:  c(t) = value
///   - sinusoid:  c(t) = base * (1 + rel_amplitude * cos(2*pi*t/period + phase))
///   - table:     piecewise-linear through (times[i], values[i]), extended
///                periodically with period times.back() - times.front()
///
/// Construction validates the form, so evaluation never fails.
class TimeCoefficient {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Sinusoid {
    double base = 0.0;
    double rel_amplitude = 0.0;
    double phase = 0.0;
    double period = 1.0;
  };
  struct Table {
    std::vector<double> times;
    std::vector<double> values;
  };
  using Form = std::variant<Constant, Sinusoid, Table>;

  TimeCoefficient() : form_(Constant{0.0}) {}

  static TimeCoefficient constant(double value) {
    if (!std::isfinite(value) || value < 0.0)
      throw std::invalid_argument("constant coefficient must be finite and >= 0");
    return TimeCoefficient(Constant{value});
  }

  static TimeCoefficient sinusoid(double base, double rel_amplitude, double phase = 0.0,
                                  double period = 1.0) {
    if (!std::isfinite(base) || base < 0.0)
      throw std::invalid_argument("sinusoid base must be finite and >= 0");
    if (!(rel_amplitude >= 0.0 && rel_amplitude <= 1.0))
      throw std::invalid_argument("sinusoid rel_amplitude must lie in [0, 1]");
    if (!std::isfinite(phase)) throw std::invalid_argument("sinusoid phase must be finite");
    if (!std::isfinite(period) || period <= 0.0)
      throw std::invalid_argument("sinusoid period must be > 0");
    return TimeCoefficient(Sinusoid{base, rel_amplitude, phase, period});
  }

  static TimeCoefficient table(std::vector<double> times, std::vector<double> values) {
    if (times.size() < 2 || times.size() != values.size())
      throw std::invalid_argument("table needs >= 2 knots and matching value count");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(values[i]) || values[i] < 0.0)
        throw std::invalid_argument("table knots must be finite with values >= 0");
      if (i > 0 && !(times[i] > times[i - 1]))
        throw std::invalid_argument("table times must be strictly ascending");
    }
    if (std::abs(values.front() - values.back()) > 1e-12 * (1.0 + std::abs(values.front())))
      throw std::invalid_argument("periodic table must have equal first and last values");
    return TimeCoefficient(Table{std::move(times), std::move(values)});
  }

  const Form& form() const noexcept { return form_; }

  double operator()(double t) const { return value(t); }

  double value(double t) const {
    return std::visit(
        [t](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) {
            return f.value;
          } else if constexpr (std::is_same_v<F, Sinusoid>) {
            const double v =
                f.base * (1.0 + f.rel_amplitude *
                                    std::cos(2.0 * std::numbers::pi * t / f.period + f.phase));
            return v > 0.0 ? v : 0.0;
          } else {
            return table_value(f, t);
          }
        },
        form_);
  }

  /// Least upper bound as a closed form (sinusoid: base * (1 + rel_amplitude)).
  double upper_bound() const {
    return std::visit(
        [](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) return f.value;
          else if constexpr (std::is_same_v<F, Sinusoid>) return f.base * (1.0 + f.rel_amplitude);
          else return *std::max_element(f.values.begin(), f.values.end());
        },
        form_);
  }

  double lower_bound() const {
    return std::visit(
        [](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) return f.value;
          else if constexpr (std::is_same_v<F, Sinusoid>) return f.base * (1.0 - f.rel_amplitude);
          else return *std::min_element(f.values.begin(), f.values.end());
        },
        form_);
  }

  /// Period of the coefficient, or nullopt for a constant (invariant under every shift).
  std::optional<double> period() const {
    return std::visit(
        [](const auto& f) -> std::optional<double> {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) return std::nullopt;
          else if constexpr (std::is_same_v<F, Sinusoid>) return f.period;
          else return f.times.back() - f.times.front();
        },
        form_);
  }

  bool is_constant() const noexcept { return std::holds_alternative<Constant>(form_); }

  /// Replace the scale of the coefficient: constant value, sinusoid base, or
  /// a uniform rescale of the table so its first value equals `scale`.
  TimeCoefficient with_scale(double scale) const {
    return std::visit(
        [scale](const auto& f) -> TimeCoefficient {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) {
            return constant(scale);
          } else if constexpr (std::is_same_v<F, Sinusoid>) {
            return sinusoid(scale, f.rel_amplitude, f.phase, f.period);
          } else {
            const double ref = f.values.front();
            if (ref == 0.0) throw std::invalid_argument("cannot rescale a table starting at 0");
            std::vector<double> v = f.values;
            for (double& x : v) x *= scale / ref;
            return table(f.times, std::move(v));
          }
        },
        form_);
  }

  std::string kind_name() const {
    switch (form_.index()) {
      case 0: return "constant";
      case 1: return "sinusoid";
      default: return "table";
    }
  }

  friend bool operator==(const TimeCoefficient& a, const TimeCoefficient& b) {
    if (a.form_.index() != b.form_.index()) return false;
    if (const auto* x = std::get_if<Constant>(&a.form_))
      return x->value == std::get<Constant>(b.form_).value;
    if (const auto* x = std::get_if<Sinusoid>(&a.form_)) {
      const auto& y = std::get<Sinusoid>(b.form_);
      return x->base == y.base && x->rel_amplitude == y.rel_amplitude && x->phase == y.phase &&
             x->period == y.period;
    }
    const auto& x = std::get<Table>(a.form_);
    const auto& y = std::get<Table>(b.form_);
    return x.times == y.times && x.values == y.values;
  }

 private:
  explicit TimeCoefficient(Form form) : form_(std::move(form)) {}

  static double table_value(const Table& f, double t) {
    const double t0 = f.times.front();
    const double span = f.times.back() - t0;
    double u = std::fmod(t - t0, span);
    if (u < 0.0) u += span;
    u += t0;
    auto it = std::upper_bound(f.times.begin(), f.times.end(), u);
    if (it == f.times.end()) return f.values.back();
    if (it == f.times.begin()) return f.values.front();
    const std::size_t j = static_cast<std::size_t>(it - f.times.begin());
    const double w = (u - f.times[j - 1]) / (f.times[j] - f.times[j - 1]);
    return f.values[j - 1] + w * (f.values[j] - f.values[j - 1]);
  }

  Form form_;
};

inline double eval_coefficient(const TimeCoefficient& c, double t) { return c.value(t); }

/// Sampled extrema of a coefficient over [t0, t0 + window].
struct SampledBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline SampledBounds sampled_bounds(const TimeCoefficient& c, double window, double t0 = 0.0,
                                    std::size_t samples = 4096) {
  SampledBounds b{c.value(t0), c.value(t0)};
  for (std::size_t i = 1; i <= samples; ++i) {
    const double v = c.value(t0 + window * static_cast<double>(i) / static_cast<double>(samples));
    b.lower = std::min(b.lower, v);
    b.upper = std::max(b.upper, v);
  }
  return b;
}

}  // namespace ecoepi
