#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ecoepi/experiments.hpp"
#include "ecoepi/model_io.hpp"

using namespace ecoepi;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Evaluate every coefficient, both responses and the full field at random
// times and states; the two models must agree exactly.
void expect_equivalent(const EcoEpiModel& a, const EcoEpiModel& b, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(-5.0, 5.0), ux(0.0, 4.0);
  const auto ca = a.coefficients(), cb = b.coefficients();
  ASSERT_EQ(ca.size(), cb.size());
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.common_period, b.common_period);
  for (int i = 0; i < 100; ++i) {
    const double t = ut(rng);
    for (std::size_t k = 0; k < ca.size(); ++k) EXPECT_EQ((*ca[k].second)(t), (*cb[k].second)(t)) << ca[k].first;
    const State<3> y{ux(rng), ux(rng), ux(rng)};
    EXPECT_EQ(a.f(y[0], y[1], y[2]), b.f(y[0], y[1], y[2]));
    EXPECT_EQ(a.g(y[0], y[1], y[2]), b.g(y[0], y[1], y[2]));
    EXPECT_EQ(full_rhs(a, t, y), full_rhs(b, t, y));
  }
}

const char* kMinimal = R"({
  "name": "tiny",
  "common_period": null,
  "a": 0.5, "beta": 0.2, "eta": 0.3, "c": 0.1, "gamma": 0.1, "theta": 0.5,
  "f": {"kind": "holling_ii", "k": 1, "m": 0.5, "axis": "S"},
  "g": {"kind": "identity", "axis": "P"},
  "G": {"kind": "affine_linear", "Lambda": 1.0, "mu": 0.2},
  "h": {"kind": "decay", "delta1": 0.1, "delta2": 0.2}
})";

}  // namespace

TEST(ModelIo, ExampleBuildersRoundTrip) {
  for (int n = 1; n <= 4; ++n) {
    auto m = example_model(n, 0.37);
    expect_equivalent(m, parse_model(serialize_model(m)), n);
  }
  for (auto m : {example3(0.2, ParameterSource::Displayed), example4(0.2, ParameterSource::Displayed)})
    expect_equivalent(m, parse_model(serialize_model(m)));
}

TEST(ModelIo, SerializationIsIdempotent) {
  const auto text = serialize_model(example4(0.3));
  EXPECT_EQ(serialize_model(parse_model(text)), text);
}

TEST(ModelIo, EveryResponseKindRoundTrips) {
  using namespace response;
  std::vector<FunctionalResponse> all = {
      Zero{}, Identity{Axis::P}, HollingI{1.3, Axis::S}, HollingII{0.7, 2.0, Axis::P},
      HollingIII{1.0, 0.5, 1.5, Axis::S}, HollingIV{1.0, 0.2, 0.3, 0.9, Axis::S},
      BeddingtonDeAngelis{1.0, 0.5, 0.25, 2.0, Axis::P}, CrowleyMartin{1.0, 0.5, 0.25, 0.1, 1.5, Axis::S},
      RatioDependent{1.0, 2.0, Axis::S}, GeneralRatio{1.0, 1.0, 2.0, 1.0, 0.3, 0.1, 0.2, Axis::S}, Product{0.4}};
  for (const auto& r : all) {
    auto back = response_from_json(response_to_json(r), "f");
    EXPECT_EQ(back.kind_name(), r.kind_name());
    for (double s : {0.0, 0.5, 3.0})
      for (double p : {0.0, 1.0, 2.5}) EXPECT_EQ(back(s, 0.2, p), r(s, 0.2, p)) << r.kind_name();
  }
}

TEST(ModelIo, TableCoefficientRoundTrips) {
  auto c = TimeCoefficient::table({0.0, 0.25, 0.5, 1.0}, {1.0, 2.0, 0.5, 1.0});
  auto back = coefficient_from_json(coefficient_to_json(c), "beta");
  for (double t = -2.0; t < 3.0; t += 0.073) EXPECT_EQ(back(t), c(t));
}

TEST(ModelIo, MinimalDocumentWithShorthand) {
  auto m = parse_model(kMinimal);
  EXPECT_EQ(m.name, "tiny");
  EXPECT_FALSE(m.common_period);
  EXPECT_DOUBLE_EQ(m.beta(3.3), 0.2);
  EXPECT_DOUBLE_EQ(m.G(0.0, 2.0), 1.0 - 0.4);
  EXPECT_DOUBLE_EQ(m.h(0.0, 1.0), -0.1 - 0.2);
  expect_equivalent(m, parse_model(serialize_model(m)));
}

TEST(ModelIo, ShippedModelFilesMatchBuilders) {
  const std::string dir = std::string(ECOEPI_SOURCE_DIR) + "/models/";
  expect_equivalent(load_model(dir + "example1.json"), example1(0.01));
  expect_equivalent(load_model(dir + "example2.json"), example2(0.1));
  expect_equivalent(load_model(dir + "example3.json"), example3(0.1));
  expect_equivalent(load_model(dir + "example4.json"), example4(0.01));
  expect_equivalent(load_model(dir + "example4_displayed.json"), example4(0.01, ParameterSource::Displayed));
  EXPECT_EQ(read_file(dir + "example2.json"), serialize_model(example2(0.1)));
}

TEST(ModelIo, MalformedDocumentsAreRejected) {
  auto broken = [](const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
  };
  std::vector<std::string> bad = {
      "{",                                                         // syntax
      "[]",                                                        // not an object
      broken("\"name\": \"tiny\",", "\"name\": \"tiny\", \"extra\": 1,"),  // unknown key
      broken("\"beta\": 0.2,", ""),                                // missing coefficient
      broken("\"beta\": 0.2", "\"beta\": -0.2"),                   // negative constant
      broken("\"beta\": 0.2", "\"beta\": {\"kind\": \"spline\"}"), // unknown coefficient kind
      broken("\"holling_ii\"", "\"holling_ix\""),                  // unknown response kind
      broken("\"axis\": \"S\"", "\"axis\": \"Q\""),                // bad axis
      broken("\"m\": 0.5", "\"q\": 0.5"),                          // unknown response parameter
      broken("\"affine_linear\"", "\"quadratic\""),                // bad G kind
      broken("\"decay\"", "\"growthish\""),                        // bad h kind
      broken("\"common_period\": null", "\"common_period\": -1"),  // bad period
      broken("\"name\": \"tiny\"", "\"name\": 3"),                 // bad name type
  };
  for (const auto& text : bad) EXPECT_THROW(parse_model(text), ModelFormatError) << text;
  EXPECT_THROW(load_model("/nonexistent/model.json"), ModelFormatError);
}
