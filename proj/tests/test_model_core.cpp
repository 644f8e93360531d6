#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ecoepi/experiments.hpp"
#include "ecoepi/model.hpp"
#include "ecoepi/validation.hpp"
#include "oracles.hpp"

using namespace ecoepi;

TEST(Coefficient, ConstantEvaluatesToValue) {
  EXPECT_EQ(eval_coefficient(TimeCoefficient::constant(0.1), 17.3), 0.1);
}

TEST(Coefficient, SinusoidAtZero) {
  EXPECT_NEAR(eval_coefficient(TimeCoefficient::sinusoid(0.3, 0.7, 0.0, 1.0), 0.0), 0.51, 1e-15);
  EXPECT_NEAR(eval_coefficient(TimeCoefficient::sinusoid(0.7, 0.7, std::numbers::pi, 1.0), 0.0), 0.21, 1e-15);
}

TEST(Coefficient, UpperBoundOfSinusoid) {
  auto s = TimeCoefficient::sinusoid(0.3, 0.7, 0.4, 2.0);
  EXPECT_DOUBLE_EQ(s.upper_bound(), 0.3 * 1.7);
  EXPECT_DOUBLE_EQ(s.lower_bound(), 0.3 * 0.3);
  auto b = sampled_bounds(s, 2.0);
  EXPECT_LE(b.upper, s.upper_bound() + 1e-15);
  EXPECT_GE(b.lower, s.lower_bound() - 1e-15);
  EXPECT_NEAR(b.upper, s.upper_bound(), 1e-6);
}

TEST(Coefficient, ZeroAmplitudeSinusoidIsConstant) {
  auto s = TimeCoefficient::sinusoid(0.42, 0.0, 1.3, 0.7);
  auto k = TimeCoefficient::constant(0.42);
  for (double t = 0.0; t < 5.0; t += 0.137) EXPECT_EQ(s(t), k(t));
}

TEST(Coefficient, RejectsInvalidForms) {
  EXPECT_THROW(TimeCoefficient::constant(-1.0), std::invalid_argument);
  EXPECT_THROW(TimeCoefficient::sinusoid(1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(TimeCoefficient::sinusoid(1.0, 0.5, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(TimeCoefficient::table({0.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(TimeCoefficient::table({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(TimeCoefficient::table({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(TimeCoefficient::table({0.0, 0.5, 1.0}, {1.0, -2.0, 1.0}), std::invalid_argument);
}

TEST(Coefficient, TableInterpolatesAndRepeats) {
  auto tb = TimeCoefficient::table({0.0, 0.5, 1.0}, {1.0, 3.0, 1.0});
  EXPECT_DOUBLE_EQ(tb(0.25), 2.0);
  EXPECT_DOUBLE_EQ(tb(0.5), 3.0);
  EXPECT_DOUBLE_EQ(tb(1.25), 2.0);
  EXPECT_DOUBLE_EQ(tb(7.75), 2.0);
  EXPECT_EQ(tb.period().value(), 1.0);
  EXPECT_DOUBLE_EQ(tb.upper_bound(), 3.0);
  auto scaled = tb.with_scale(2.0);
  EXPECT_DOUBLE_EQ(scaled(0.5), 6.0);
}

TEST(Coefficient, WithScaleChangesSinusoidBase) {
  auto s = TimeCoefficient::sinusoid(0.1, 0.7).with_scale(0.3);
  EXPECT_NEAR(s(0.0), 0.51, 1e-15);
}

TEST(Response, HollingIIHalfSaturation) {
  FunctionalResponse f = response::HollingII{1.0, 1.0};
  EXPECT_DOUBLE_EQ(eval_response(f, 1.0, 0.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(eval_response(f, 1.0, 0.0, 123.0), 0.5);
}

TEST(Response, RatioDependentOriginIsZero) {
  FunctionalResponse f = response::RatioDependent{1.0, 2.0};
  EXPECT_EQ(eval_response(f, 0.0, 0.0, 0.0), 0.0);
}

TEST(Response, RatioDependentArithmetic) {
  FunctionalResponse f = response::RatioDependent{1.0, 2.0};
  EXPECT_NEAR(eval_response(f, 5.0, 0.0, 1.154), 5.0 / (2.0 * 1.154 + 5.0), 1e-15);
  EXPECT_NEAR(eval_response(f, 5.0, 0.0, 1.154), 0.6842, 1e-4);
}

TEST(Response, NegativeInputIsDomainError) {
  FunctionalResponse f = response::HollingII{1.0, 1.0};
  EXPECT_THROW(f(-1.0, 0.0, 0.0), std::domain_error);
  EXPECT_THROW(f(0.0, -1e-12, 0.0), std::domain_error);
  EXPECT_THROW(f(0.0, 0.0, -3.0), std::domain_error);
  EXPECT_DOUBLE_EQ(f.value_clamped(-1.0, 0.0, 0.0), 0.0);
}

TEST(Response, CatalogFormulas) {
  const double S = 1.3, I = 0.4, P = 2.1;
  EXPECT_DOUBLE_EQ(FunctionalResponse(response::Identity{Axis::P})(S, I, P), P);
  EXPECT_DOUBLE_EQ(FunctionalResponse(response::HollingI{0.5})(S, I, P), 0.5 * S);
  EXPECT_NEAR(FunctionalResponse(response::HollingIII{2.0, 0.5, 2.0})(S, I, P),
              2.0 * S * S / (1.0 + 0.5 * (S + I)), 1e-15);
  EXPECT_NEAR(FunctionalResponse(response::HollingIV{1.0, 0.5, 0.25, 2.0})(S, I, P),
              2.0 * S / (1.0 + 0.5 * (S + I) + 0.25 * (S + I) * (S + I)), 1e-15);
  EXPECT_NEAR(FunctionalResponse(response::BeddingtonDeAngelis{1.0, 0.5, 0.25, 2.0})(S, I, P),
              2.0 * S / (1.0 + 0.5 * (S + I) + 0.25 * P), 1e-15);
  EXPECT_NEAR(FunctionalResponse(response::CrowleyMartin{1.0, 0.5, 0.25, 0.1, 2.0})(S, I, P),
              2.0 * S / (1.0 + 0.5 * (S + I) + 0.25 * P + 0.1 * (S + I) * P), 1e-15);
  EXPECT_NEAR(FunctionalResponse(response::GeneralRatio{1.0, 1.0, 2.0, 1.0})(S, I, P), S / (2.0 + S + I), 1e-15);
}

TEST(Response, RejectsInvalidParameters) {
  EXPECT_THROW(FunctionalResponse(response::HollingII{-1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(FunctionalResponse(response::RatioDependent{1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(FunctionalResponse(response::HollingIII{1.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(FunctionalResponse(response::GeneralRatio{1.0, 1.0, 0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(FullRhs, OriginGivesRecruitmentOnly) {
  for (int ex = 1; ex <= 4; ++ex) {
    auto m = example_model(ex, 0.3);
    for (double t : {0.0, 0.3, 0.77}) {
      auto d = full_rhs(m, t, State<3>{0.0, 0.0, 0.0});
      EXPECT_EQ(d[0], m.G(t, 0.0));
      EXPECT_EQ(d[1], 0.0);
      EXPECT_EQ(d[2], 0.0);
    }
  }
}

TEST(FullRhs, Example2UninfectedEquilibrium) {
  auto m = example2(0.1);
  // Coexistence point: 0.7 - 0.6x = 0.9z and 0.2 - 0.6z + 0.09x = 0.
  const double x = 0.4 / 0.735, z = (0.2 + 0.09 * x) / 0.6;
  auto d = full_rhs(m, 0.0, ModelState{x, 0.0, z});
  EXPECT_LT(std::abs(d.S), 1e-9);
  EXPECT_EQ(d.I, 0.0);
  EXPECT_LT(std::abs(d.P), 1e-9);
}

TEST(FullRhs, Example1InfectedComponent) {
  const double beta0 = 0.3;
  auto m = example1(beta0);
  auto d = full_rhs(m, 0.25, State<3>{1.0, 1.0, 1.0});
  const double expect = oracle::beta(beta0, 0.25) - oracle::eta(0.25) * 1.0 - 0.1;
  EXPECT_NEAR(d[1], expect, 1e-14);
  EXPECT_NEAR(d[1], beta0 - 0.7 - 0.1, 1e-14);
}

TEST(UninfectedRhs, ZeroResponseDecouples) {
  auto m = example1(0.3);
  for (double x : {0.0, 0.5, 2.0})
    for (double z : {0.0, 0.4, 3.0}) {
      auto d = uninfected_rhs(m, 0.1, State<2>{x, z});
      EXPECT_DOUBLE_EQ(d[0], m.G(0.1, x));
      EXPECT_DOUBLE_EQ(d[1], m.h(0.1, z) * z);
    }
}

TEST(UninfectedRhs, Example2Equilibrium) {
  const double x = 0.4 / 0.735, z = (0.2 + 0.09 * x) / 0.6;
  auto d = uninfected_rhs(example2(0.1), 0.0, State<2>{x, z});
  EXPECT_LT(std::abs(d[0]), 1e-9);
  EXPECT_LT(std::abs(d[1]), 1e-9);
}

TEST(UninfectedRhs, PredatorFreeLineInvariant) {
  for (int ex = 1; ex <= 4; ++ex) {
    auto m = example_model(ex, 0.1);
    auto d = uninfected_rhs(m, 0.4, State<2>{0.8, 0.0});
    EXPECT_DOUBLE_EQ(d[0], m.G(0.4, 0.8));
    EXPECT_EQ(d[1], 0.0);
  }
}

TEST(Validation, Example3MonotonicityPasses) {
  auto rep = validate_hypotheses(example3(0.1));
  for (const char* name : {"S2 f nonnegative", "S2 g nonnegative", "S2 f nonincreasing in I",
                           "S2 f nonincreasing in P", "S2 g nonincreasing in S", "S2 g nonincreasing in I",
                           "S2 g nondecreasing in P"})
    EXPECT_TRUE(rep.passed(name)) << name;
  EXPECT_TRUE(rep.standing_hypotheses_hold());
}

TEST(Validation, ProductGFailsMonotonicityInS) {
  auto m = example2(0.1);
  m.g = response::Product{1.0};
  auto rep = validate_hypotheses(m);
  ASSERT_NE(rep.find("S2 g nonincreasing in S"), nullptr);
  EXPECT_FALSE(rep.passed("S2 g nonincreasing in S"));
  EXPECT_GT(rep.find("S2 g nonincreasing in S")->worst, 0.0);
  EXPECT_FALSE(rep.standing_hypotheses_hold());
}

TEST(Validation, Example1GIndependentOfI) {
  auto rep = validate_hypotheses(example1(0.01));
  EXPECT_TRUE(rep.passed("g independent of I"));
  EXPECT_TRUE(rep.extinction_basic_conditions());
}

TEST(Validation, SideConditionsPerExample) {
  EXPECT_FALSE(validate_hypotheses(example2(0.1)).passed("G affine-linear"));
  EXPECT_TRUE(validate_hypotheses(example4(0.1)).passed("G affine-linear"));
  for (int ex = 1; ex <= 4; ++ex) {
    auto rep = validate_hypotheses(example_model(ex, 0.1));
    EXPECT_TRUE(rep.extinction_refined_conditions()) << ex;
  }
}

TEST(Validation, SubLinearHollingIIIIsNotLipschitz) {
  auto m = example3(0.1);
  m.f = response::HollingIII{1.0, 1.0, 0.5};
  auto rep = validate_hypotheses(m);
  EXPECT_FALSE(rep.passed("S2 locally Lipschitz"));
  m.f = response::HollingIII{1.0, 1.0, 2.0};
  EXPECT_TRUE(validate_hypotheses(m).passed("S2 locally Lipschitz"));
}

TEST(Validation, CommonPeriodMismatchDetected) {
  auto m = example2(0.1);
  m.common_period = 0.7;
  EXPECT_FALSE(validate_hypotheses(m).passed("common_period"));
  m.common_period = 2.0;
  EXPECT_TRUE(validate_hypotheses(m).passed("common_period"));
}

TEST(Validation, VitalChecks) {
  auto m = example2(0.1);
  m.G = SusceptibleVitalDynamics::logistic(TimeCoefficient::constant(0.0), TimeCoefficient::constant(0.6));
  EXPECT_FALSE(validate_hypotheses(m).passed("vital k(t,0) > 0"));
  m.h = PredatorVitalRate::growth(TimeCoefficient::constant(0.2), TimeCoefficient::constant(0.0));
  EXPECT_FALSE(validate_hypotheses(m).passed("vital predator slope > 0"));
}

TEST(VRho, DefaultsAndValidation) {
  VRhoSpec v;
  EXPECT_EQ(v.v(0.02), 0.02);
  EXPECT_NO_THROW(v.validate());
  v.v_slope_lower = 2.0;
  EXPECT_THROW(v.validate(), std::invalid_argument);
  VRhoSpec w;
  w.rho = TimeCoefficient::constant(3.0);
  EXPECT_THROW(w.validate(), std::invalid_argument);
}

TEST(Vital, AffineHasNoPerCapitaFactor) {
  auto G = SusceptibleVitalDynamics::affine(TimeCoefficient::constant(3.0), TimeCoefficient::constant(0.6));
  EXPECT_DOUBLE_EQ(G(0.0, 5.0), 0.0);
  EXPECT_THROW(G.per_capita(0.0, 1.0), std::logic_error);
  auto H = PredatorVitalRate::decay(TimeCoefficient::constant(0.2), TimeCoefficient::constant(0.3));
  EXPECT_DOUBLE_EQ(H(0.0, 1.0), -0.5);
}
