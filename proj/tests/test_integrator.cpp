#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ecoepi/experiments.hpp"
#include "ecoepi/integrator.hpp"
#include "oracles.hpp"

using namespace ecoepi;

namespace {

Field<1> logistic_field(double r, double k) {
  return [r, k](double, const State<1>& y) -> State<1> { return {(r - k * y[0]) * y[0]}; };
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  auto tr = integrate<1>([](double, const State<1>& y) -> State<1> { return {-y[0]}; }, {1.0}, 0.0, 1.0);
  EXPECT_NEAR(tr.back()[0], std::exp(-1.0), 1e-8);
  EXPECT_EQ(tr.t_end(), 1.0);
}

TEST(Integrate, LogisticPreyReachesCarryingCapacity) {
  auto tr = integrate<1>(logistic_field(0.7, 0.6), {1.0}, 0.0, 50.0);
  EXPECT_NEAR(tr.back()[0], oracle::logistic(0.7, 0.6, 1.0, 50.0), 1e-9);
  EXPECT_NEAR(tr.back()[0], 7.0 / 6.0, 1e-6);
}

TEST(Integrate, LogisticPredator) {
  auto tr = integrate<1>(logistic_field(0.2, 0.6), {0.1}, 0.0, 80.0);
  EXPECT_NEAR(tr.back()[0], 1.0 / 3.0, 1e-6);
}

TEST(Integrate, RejectsBadSpanAndControl) {
  auto f = logistic_field(0.7, 0.6);
  EXPECT_THROW(integrate<1>(f, {1.0}, 1.0, 1.0), std::invalid_argument);
  IntegrationControl bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(integrate<1>(f, {1.0}, 0.0, 1.0, bad), std::invalid_argument);
}

TEST(Integrate, OutwardFieldAtZeroIsNegativityViolation) {
  EXPECT_THROW(integrate<1>([](double, const State<1>&) -> State<1> { return {-1.0}; }, {0.5}, 0.0, 2.0),
               NegativityViolation);
}

TEST(Integrate, BlowUpIsStepSizeUnderflow) {
  EXPECT_THROW(integrate<1>([](double, const State<1>& y) -> State<1> { return {y[0] * y[0]}; }, {1.0}, 0.0, 2.0),
               StepSizeUnderflow);
}

TEST(Integrate, StaysNonnegativeNearZero) {
  // Fast decay to zero exercises the clip-then-project path.
  auto tr = integrate<1>([](double, const State<1>& y) -> State<1> { return {-50.0 * y[0]}; }, {1.0}, 0.0, 20.0);
  for (const auto& s : tr.states()) EXPECT_GE(s[0], 0.0);
}

TEST(Sample, KnotReturnsStoredState) {
  auto tr = integrate<1>(logistic_field(0.7, 0.6), {0.2}, 0.0, 10.0);
  for (std::size_t k = 0; k < tr.knot_count(); ++k) EXPECT_EQ(tr.sample(tr.times()[k])[0], tr.states()[k][0]);
}

TEST(Sample, MatchesClosedFormBetweenKnots) {
  auto tr = integrate<1>(logistic_field(0.7, 0.6), {1.0}, 0.0, 50.0);
  EXPECT_NEAR(tr.sample(50.0)[0], 7.0 / 6.0, 1e-6);
  for (double t = 0.05; t < 50.0; t += 0.731) EXPECT_NEAR(tr.sample(t)[0], oracle::logistic(0.7, 0.6, 1.0, t), 1e-7);
}

TEST(Sample, AgreesWithReintegration) {
  auto f = logistic_field(0.7, 0.6);
  IntegrationControl ctl;
  auto tr = integrate<1>(f, {0.3}, 0.0, 10.0, ctl);
  for (double t : {0.37, 2.9, 6.123, 9.99}) {
    auto direct = integrate<1>(f, {0.3}, 0.0, t, ctl).back()[0];
    EXPECT_NEAR(tr.sample(t)[0], direct, 10.0 * (ctl.rel_tol * std::abs(direct) + ctl.abs_tol) * 10.0);
  }
}

TEST(Sample, ConstantFieldIsConstant) {
  auto tr = integrate<2>([](double, const State<2>&) -> State<2> { return {0.0, 0.0}; }, {0.4, 2.0}, 0.0, 5.0);
  for (double t = 0.0; t <= 5.0; t += 0.33) {
    EXPECT_EQ(tr.sample(t)[0], 0.4);
    EXPECT_EQ(tr.sample(t)[1], 2.0);
  }
}

TEST(Sample, OutOfSpanThrows) {
  auto tr = integrate<1>(logistic_field(0.7, 0.6), {1.0}, 0.0, 1.0);
  EXPECT_THROW(tr.sample(-0.1), OutOfSpan);
  EXPECT_THROW(tr.sample(1.5), OutOfSpan);
}

TEST(Trajectory, CsvHeaderAndPrecision) {
  auto tr = integrate<1>(logistic_field(0.7, 0.6), {1.0}, 0.0, 1.0);
  std::ostringstream os;
  std::vector<std::string> names{"s"};
  tr.write_csv(os, names, 0.5);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,s");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 4), "0.5,");
  const auto value = line.substr(4);
  EXPECT_EQ(std::stod(value), tr.sample(0.5)[0]);
}

TEST(Trajectory, KnotTimesStrictlyIncrease) {
  auto tr = integrate<3>(full_field(example2(0.8)), {1.0, 0.5, 0.1}, 0.0, 30.0);
  for (std::size_t k = 1; k < tr.knot_count(); ++k) EXPECT_LT(tr.times()[k - 1], tr.times()[k]);
}

TEST(Integrate, Deterministic) {
  const auto f = full_field(example4(0.3));
  auto a = integrate<3>(f, {1.0, 0.2, 0.5}, 0.0, 40.0);
  auto b = integrate<3>(f, {1.0, 0.2, 0.5}, 0.0, 40.0);
  ASSERT_EQ(a.knot_count(), b.knot_count());
  for (std::size_t k = 0; k < a.knot_count(); ++k)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.states()[k][i], b.states()[k][i]);
}

TEST(Integrate, DiseaseFreeFaceIsInvariant) {
  for (int n = 1; n <= 4; ++n) {
    auto tr = integrate<3>(full_field(example_model(n, 0.3)), {1.0, 0.0, 0.5}, 0.0, 30.0);
    for (const auto& s : tr.states()) EXPECT_EQ(s[1], 0.0) << "example " << n;
  }
}

TEST(Integrate, HalvingToleranceHalvesError) {
  const auto f = logistic_field(0.7, 0.6);
  auto err_at = [&](double tol) {
    IntegrationControl ctl;
    ctl.rel_tol = tol;
    ctl.abs_tol = tol * 1e-2;
    auto tr = integrate<1>(f, {0.1}, 0.0, 10.0, ctl);
    double e = 0.0;
    for (std::size_t k = 0; k < tr.knot_count(); ++k)
      e = std::max(e, std::abs(tr.states()[k][0] - oracle::logistic(0.7, 0.6, 0.1, tr.times()[k])));
    return e;
  };
  for (double tol : {1e-8, 1e-9, 1e-10}) {
    const double e1 = err_at(tol), e2 = err_at(tol / 2.0);
    EXPECT_LE(2.0 * e2, e1) << "tol " << tol;
  }
}
