#include <gtest/gtest.h>

#include <random>

#include "ecoepi/experiments.hpp"
#include "ecoepi/validation.hpp"

using namespace ecoepi;

namespace {

std::vector<FunctionalResponse> catalog(Axis axis) {
  using namespace response;
  return {Identity{axis},
          HollingI{1.3, axis},
          HollingII{0.7, 2.0, axis},
          HollingIII{1.0, 0.5, 2.0, axis},
          HollingIII{1.0, 0.5, 0.5, axis},
          HollingIV{1.0, 0.2, 0.3, 0.9, axis},
          BeddingtonDeAngelis{1.0, 0.5, 0.25, 2.0, axis},
          CrowleyMartin{1.0, 0.5, 0.25, 0.1, 1.5, axis},
          RatioDependent{1.0, 2.0, axis},
          GeneralRatio{1.0, 1.0, 2.0, 1.0, 0.3, 0.1, 0.2, axis}};
}

std::vector<double> grid_axis(std::size_t n = 21) {
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(10.0 * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

}  // namespace

// f is predation on prey (numerator S), g on infected prey (numerator P).
TEST(ResponseProperties, PredationResponsesMonotoneOnGrid) {
  const auto ax = grid_axis();
  for (const auto& f : catalog(Axis::S)) {
    for (std::size_t i = 0; i < ax.size(); ++i)
      for (std::size_t j = 0; j < ax.size(); ++j)
        for (std::size_t k = 0; k < ax.size(); ++k) {
          const double S = ax[i], I = ax[j], P = ax[k];
          const double v = f(S, I, P);
          ASSERT_GE(v, 0.0) << f.kind_name();
          if (j + 1 < ax.size()) {
            ASSERT_LE(f(S, ax[j + 1], P), v) << f.kind_name() << " in I";
          }
          if (k + 1 < ax.size()) {
            ASSERT_LE(f(S, I, ax[k + 1]), v) << f.kind_name() << " in P";
          }
        }
  }
}

TEST(ResponseProperties, InfectedPredationResponsesMonotoneOnGrid) {
  const auto ax = grid_axis();
  for (const auto& g : catalog(Axis::P)) {
    for (std::size_t i = 0; i < ax.size(); ++i)
      for (std::size_t j = 0; j < ax.size(); ++j)
        for (std::size_t k = 0; k < ax.size(); ++k) {
          const double S = ax[i], I = ax[j], P = ax[k];
          const double v = g(S, I, P);
          ASSERT_GE(v, 0.0) << g.kind_name();
          if (i + 1 < ax.size()) {
            ASSERT_LE(g(ax[i + 1], I, P), v) << g.kind_name() << " in S";
          }
          if (j + 1 < ax.size()) {
            ASSERT_LE(g(S, ax[j + 1], P), v) << g.kind_name() << " in I";
          }
          if (k + 1 < ax.size()) {
            ASSERT_GE(g(S, I, ax[k + 1]), v) << g.kind_name() << " in P";
          }
        }
  }
}

TEST(ResponseProperties, ValidatorAgreesOnCatalog) {
  auto fs = catalog(Axis::S), gs = catalog(Axis::P);
  for (std::size_t n = 0; n < fs.size(); ++n) {
    auto m = example2(0.3);
    m.f = fs[n];
    m.g = gs[n];
    auto rep = validate_hypotheses(m);
    for (const char* name : {"S2 f nonnegative", "S2 g nonnegative", "S2 f nonincreasing in I",
                             "S2 f nonincreasing in P", "S2 g nonincreasing in S", "S2 g nonincreasing in I",
                             "S2 g nondecreasing in P"})
      EXPECT_TRUE(rep.passed(name)) << fs[n].kind_name() << ": " << name;
  }
}

TEST(ResponseProperties, ValidatorCatchesIncreasingInS) {
  auto m = example2(0.1);
  m.g = response::Product{};
  EXPECT_FALSE(validate_hypotheses(m).passed("S2 g nonincreasing in S"));
}

TEST(ResponseProperties, RatioDependentVanishesAtOrigin) {
  EXPECT_EQ(FunctionalResponse(response::RatioDependent{1.0, 2.0, Axis::S})(0.0, 0.0, 0.0), 0.0);
}

TEST(FieldProperties, InfectedFreePlaneInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.0, 3.0), ux(0.0, 10.0);
  for (int n = 1; n <= 4; ++n) {
    auto m = example_model(n, 0.5);
    for (int i = 0; i < 200; ++i) {
      const double t = ut(rng);
      const State<3> y{ux(rng), 0.0, ux(rng)};
      EXPECT_EQ(full_rhs(m, t, y)[1], 0.0);
    }
  }
}

TEST(FieldProperties, FullFieldRestrictsToUninfectedField) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ut(0.0, 3.0), ux(0.0, 10.0);
  for (int n = 1; n <= 4; ++n) {
    auto m = example_model(n, 0.5);
    for (int i = 0; i < 200; ++i) {
      const double t = ut(rng), x = ux(rng), z = ux(rng);
      const auto full = full_rhs(m, t, State<3>{x, 0.0, z});
      const auto red = uninfected_rhs(m, t, State<2>{x, z});
      EXPECT_EQ(full[0], red[0]);
      EXPECT_EQ(full[2], red[1]);
    }
  }
}

TEST(CoefficientProperties, SinusoidPeriodicity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(-50.0, 50.0);
  for (double period : {1.0, 0.37, 2.5}) {
    auto c = TimeCoefficient::sinusoid(0.8, 0.7, 1.1, period);
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng);
      EXPECT_NEAR(c(t + period), c(t), 1e-12);
    }
  }
}

TEST(CoefficientProperties, TablePeriodicExtension) {
  auto c = TimeCoefficient::table({0.0, 0.5, 1.0}, {1.0, 3.0, 1.0});
  EXPECT_DOUBLE_EQ(c(0.25), 2.0);
  EXPECT_NEAR(c(7.25), 2.0, 1e-12);
  EXPECT_NEAR(c(-0.75), 2.0, 1e-12);
}
