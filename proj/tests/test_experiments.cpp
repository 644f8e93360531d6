#include <gtest/gtest.h>

#include <cmath>

#include "ecoepi/experiments.hpp"
#include "oracles.hpp"

using namespace ecoepi;

namespace {

CampaignOptions quick() {
  CampaignOptions o;
  o.thresholds = false;
  return o;
}

void expect_all(const CampaignResult& r, EmpiricalClass want) {
  ASSERT_EQ(r.runs.size(), 3u);
  for (const auto& run : r.runs) {
    EXPECT_TRUE(run.ok) << run.error;
    EXPECT_EQ(run.empirical, want) << r.model << " ic (" << run.ic[0] << "," << run.ic[1] << "," << run.ic[2] << ")";
  }
}

}  // namespace

TEST(Examples, CoefficientsMatchStatedForms) {
  auto m = example2(0.4);
  for (double t : {0.0, 0.13, 0.5, 0.91}) {
    EXPECT_NEAR(m.beta(t), oracle::beta(0.4, t), 1e-15);
    EXPECT_NEAR(m.eta(t), oracle::eta(t), 1e-15);
  }
  EXPECT_DOUBLE_EQ(m.c(0.3), 0.1);
  EXPECT_DOUBLE_EQ(m.a(0.3), 0.9);
  EXPECT_DOUBLE_EQ(m.gamma(0.3), 0.1);
  EXPECT_DOUBLE_EQ(m.theta(0.3), 0.9);
  EXPECT_EQ(m.common_period, 1.0);
}

TEST(Examples, Example4SourcesDiffer) {
  auto prose = example4(0.3, ParameterSource::Prose);
  auto shown = example4(0.3, ParameterSource::Displayed);
  EXPECT_NEAR(prose.h(0.0, 0.0), 0.2, 1e-15);
  EXPECT_NEAR(shown.h(0.0, 0.0), 0.8, 1e-15);
  EXPECT_NE(prose.name, shown.name);
  EXPECT_EQ(parse_parameter_source("displayed"), ParameterSource::Displayed);
  EXPECT_THROW(parse_parameter_source("figure"), std::invalid_argument);
}

TEST(Examples, RejectNegativeTransmission) {
  EXPECT_THROW(example2(-0.1), std::invalid_argument);
  EXPECT_THROW(example_model(5, 0.1), std::invalid_argument);
}

TEST(Examples, Example3AffineSpecialCase) {
  // z2* = (b + gamma a / (m mu + 1) + eps) / r for G = 1 - mu S at eps = 0.
  const double mu = 0.6, m = 2.0;
  const double x = 1.0 / mu;
  const double closed = (0.2 + 0.8 * 0.9 / (m * mu + 1.0)) / 0.6;
  const double root = oracle::bisect([&](double z) { return 0.2 - 0.6 * z + 0.8 * 0.9 * x / (m + x); }, 0.0, 10.0);
  EXPECT_NEAR(root, closed, 1e-12);
}

TEST(Campaign, Example2LowTransmissionExtinct) {
  auto r = run_campaign(example2(0.1));
  expect_all(r, EmpiricalClass::Extinct);
  EXPECT_EQ(r.empirical, EmpiricalClass::Extinct);
  ASSERT_TRUE(r.report);
  EXPECT_TRUE(r.agreement);
}

TEST(Campaign, Example4ProsePersistent) {
  auto r = run_campaign(example4(0.3, ParameterSource::Prose));
  expect_all(r, EmpiricalClass::Persistent);
  EXPECT_TRUE(r.agreement);
}

TEST(Campaign, InfectionFreeStartStaysExtinct) {
  for (int n = 1; n <= 4; ++n) {
    auto r = run_campaign(example_model(n, 0.9), {{1.0, 0.0, 0.5}}, {}, quick());
    ASSERT_TRUE(r.runs[0].ok);
    EXPECT_EQ(r.runs[0].tail_max_I, 0.0);
    EXPECT_EQ(r.runs[0].empirical, EmpiricalClass::Extinct);
  }
}

TEST(Campaign, DefaultInitialConditions) {
  auto ics = default_initial_conditions();
  ASSERT_EQ(ics.size(), 3u);
  EXPECT_EQ(ics[0], (State<3>{1.0, 0.5, 0.1}));
  EXPECT_EQ(ics[1], (State<3>{0.1, 0.2, 1.0}));
  EXPECT_EQ(ics[2], (State<3>{0.5, 0.5, 0.5}));
}

TEST(Campaign, RejectsNegativeInitialCondition) {
  EXPECT_THROW(run_campaign(example2(0.1), {{1.0, -0.5, 0.1}}, {}, quick()), std::invalid_argument);
}

TEST(Campaign, IntegrationFailureIsPerIc) {
  CampaignOptions o = quick();
  o.integration.max_steps = 5;
  auto r = run_campaign(example2(0.1), {{1.0, 0.5, 0.1}}, {}, o);
  EXPECT_FALSE(r.runs[0].ok);
  EXPECT_FALSE(r.runs[0].error.empty());
  EXPECT_EQ(r.empirical, EmpiricalClass::Undetermined);
}

TEST(Campaign, KeepsTrajectoriesOnRequest) {
  CampaignOptions o = quick();
  o.keep_trajectories = true;
  o.horizon = 10.0;
  auto r = run_campaign(example2(0.1), {{1.0, 0.5, 0.1}}, {}, o);
  ASSERT_TRUE(r.runs[0].trajectory);
  EXPECT_EQ(r.runs[0].trajectory->t_end(), 10.0);
}

TEST(CampaignProperties, PositivityAlongEveryRun) {
  for (const auto& sc : paper_scenarios()) {
    auto r = run_campaign(example_model(sc.example, sc.beta0), {}, quick());
    for (const auto& run : r.runs) {
      ASSERT_TRUE(run.ok) << run.error;
      EXPECT_GE(run.min_component, 0.0);
    }
  }
}

TEST(CampaignProperties, TailStaysInAbsorbingBox) {
  for (int n = 2; n <= 4; ++n)
    for (double b : {0.1, 0.8}) {
      auto m = example_model(n, b);
      auto box = absorbing_bound(m);
      auto r = run_campaign(m, {}, quick());
      for (const auto& run : r.runs) {
        EXPECT_LE(run.tail_max_SI, 1.05 * box.SI_top) << m.name << " " << b;
        EXPECT_LE(run.tail_max_P, 1.05 * box.P_top) << m.name << " " << b;
      }
    }
}

TEST(CampaignProperties, ScenarioSignsAndSimulationsAgree) {
  for (const auto& sc : paper_scenarios()) {
    auto m = example_model(sc.example, sc.beta0);
    auto r = run_campaign(m, {}, quick());
    expect_all(r, sc.extinction ? EmpiricalClass::Extinct : EmpiricalClass::Persistent);
  }
}

TEST(Reproduction, RowsAndFlags) {
  auto rep = reproduce_paper();
  ASSERT_EQ(rep.rows.size(), 8u);
  auto row = [&](int ex, double b) -> const ReproductionRow& {
    for (const auto& r : rep.rows)
      if (r.scenario.example == ex && r.scenario.beta0 == b) return r;
    throw std::logic_error("missing row");
  };
  const auto& r21 = row(2, 0.1);
  EXPECT_NEAR(*r21.computed, -0.2167, 1e-4);
  EXPECT_TRUE(r21.sign_ok);
  EXPECT_TRUE(r21.value_ok);
  const auto& r13 = row(1, 0.3);
  EXPECT_NEAR(*r13.computed, 0.25, 1e-6);
  EXPECT_TRUE(r13.sign_ok);
  EXPECT_FALSE(r13.value_ok);
  EXPECT_NE(std::find(r13.flags.begin(), r13.flags.end(), "value_mismatch"), r13.flags.end());
  const auto& r401 = row(4, 0.01);
  EXPECT_NEAR(*r401.computed, -0.2833, 1e-4);
  EXPECT_TRUE(r401.value_ok);
  auto j = rep.to_json();
  EXPECT_EQ(j["rows"].size(), 8u);
  EXPECT_NE(rep.to_table().find("R_upper"), std::string::npos);
}
