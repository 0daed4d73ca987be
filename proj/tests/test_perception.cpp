#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"
#include "vibronoise/perception.hpp"

using namespace vibronoise;

namespace {

PerceptionModel two_knot(double t_lo, double e_lo, double t_hi, double e_hi) {
  return PerceptionModel({{100.0, t_lo, e_lo}, {20000.0, t_hi, e_hi}});
}

// Constant AT = 0.01, alpha = 0.6 everywhere.
PerceptionModel flat_model() { return two_knot(0.01, 0.6, 0.01, 0.6); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Perception, ThresholdExactAtKnots) {
  const auto m = PerceptionModel::default_model();
  for (const auto& k : m.knots()) {
    EXPECT_EQ(m.threshold_at(k.hz), k.threshold) << k.hz;
    EXPECT_EQ(m.exponent_at(k.hz), k.exponent) << k.hz;
  }
}

TEST(Perception, ThresholdLogLogMidpoint) {
  // 200 Hz is the geometric mean of 100 and 400; so the threshold is the geometric mean.
  const PerceptionModel m({{100.0, 0.04, 1.0}, {400.0, 0.01, 1.0}, {20000.0, 0.5, 1.0}});
  EXPECT_NEAR(m.threshold_at(200.0), std::sqrt(0.04 * 0.01), 1e-15);
}

TEST(Perception, ExponentLogFrequencyMidpoint) {
  const PerceptionModel m({{100.0, 0.01, 1.0}, {10000.0, 0.01, 0.5}, {20000.0, 0.01, 0.5}});
  EXPECT_NEAR(m.exponent_at(1000.0), 0.75, 1e-15);
}

TEST(Perception, OutOfRangeFrequencyIsDomainError) {
  const auto m = PerceptionModel::default_model();
  EXPECT_THROW(m.threshold_at(50.0), DomainError);
  EXPECT_THROW(m.exponent_at(25000.0), DomainError);
  EXPECT_THROW(m.perceived_intensity(0.1, 99.9), DomainError);
}

TEST(Perception, IntensityExamples) {
  const auto m = PerceptionModel::default_model();
  for (double f : {100.0, 250.0, 777.0, 19999.0}) {
    EXPECT_NEAR(m.perceived_intensity(m.threshold_at(f), f), 1.0, 1e-12);
    EXPECT_EQ(m.perceived_intensity(0.0, f), 0.0);
  }
  const auto half = two_knot(0.02, 0.5, 0.02, 0.5);
  EXPECT_NEAR(half.perceived_intensity(0.04, 300.0), 2.0, 1e-12);
  EXPECT_THROW(m.perceived_intensity(-1e-9, 300.0), DomainError);
}

TEST(Perception, InverseExamples) {
  const auto m = PerceptionModel::default_model();
  EXPECT_NEAR(m.amplitude_for_intensity(1.0, 640.0), m.threshold_at(640.0), 1e-15);
  EXPECT_EQ(m.amplitude_for_intensity(0.0, 640.0), 0.0);
  // Closed form 0.01 * 4^(1/1.2).
  EXPECT_NEAR(flat_model().amplitude_for_intensity(4.0, 200.0), 0.01 * std::pow(4.0, 1.0 / 1.2),
              1e-15);
  EXPECT_NEAR(flat_model().amplitude_for_intensity(4.0, 200.0), 0.031748021039364, 1e-15);
  EXPECT_THROW(m.amplitude_for_intensity(-1.0, 640.0), DomainError);
}

TEST(Perception, RoundTripScaleAndMonotonicityProperties) {
  const auto m = PerceptionModel::default_model();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> logf(std::log(100.0), std::log(20000.0));
  std::uniform_real_distribution<double> logi(std::log(1e-3), std::log(1e6));
  std::uniform_real_distribution<double> amp(1e-4, 1.0), scale(0.1, 10.0);
  for (int t = 0; t < 2000; ++t) {
    const double f = std::exp(logf(rng));
    const double i = std::exp(logi(rng));
    EXPECT_LT(rel_err(m.perceived_intensity(m.amplitude_for_intensity(i, f), f), i), 1e-9);

    const double a = amp(rng), k = scale(rng);
    const double expected = std::pow(k, 2.0 * m.exponent_at(f)) * m.perceived_intensity(a, f);
    EXPECT_LT(rel_err(m.perceived_intensity(k * a, f), expected), 1e-9);
    EXPECT_LT(m.perceived_intensity(a, f), m.perceived_intensity(a * 1.001, f));
  }
}

TEST(Perception, LoadValidModel) {
  const auto doc = nlohmann::json::parse(R"({"knots":[
      {"hz":100,"threshold":0.02,"exponent":0.6},
      {"hz":20000,"threshold":0.5,"exponent":0.4}]})");
  const auto m = load_model(doc);
  EXPECT_EQ(m.knots().size(), 2u);
  EXPECT_EQ(m.reference_gain(), 1.0);
}

TEST(Perception, LoadRejectsInvariantViolationsWithAllFailures) {
  const auto descending = nlohmann::json::parse(R"({"knots":[
      {"hz":20000,"threshold":0.5,"exponent":0.4},
      {"hz":100,"threshold":0.02,"exponent":0.6}]})");
  EXPECT_THROW(load_model(descending), ValidationError);

  const auto zero = nlohmann::json::parse(R"({"knots":[
      {"hz":100,"threshold":0.0,"exponent":0.6},
      {"hz":20000,"threshold":0.5,"exponent":-1}]})");
  try {
    load_model(zero);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.failures().size(), 2u);
    EXPECT_NE(e.failures()[0].find("knot 0"), std::string::npos);
    EXPECT_NE(e.failures()[1].find("knot 1"), std::string::npos);
  }

  const auto gap = nlohmann::json::parse(R"({"knots":[
      {"hz":150,"threshold":0.02,"exponent":0.6},
      {"hz":20000,"threshold":0.5,"exponent":0.4}]})");
  EXPECT_THROW(load_model(gap), ValidationError);
  EXPECT_THROW(load_model(nlohmann::json::parse(R"({"knots":[{"hz":100}]})")), ValidationError);
}

TEST(Perception, JsonRoundTripIsExact) {
  const PerceptionModel m({{100.0, 0.1 / 3.0, 0.61}, {1234.5, 0.0070000000000000001, 0.5},
                           {20000.0, 0.9, 1.0 / 3.0}},
                          2.5);
  const auto text = to_json(m).dump();
  const auto back = load_model(nlohmann::json::parse(text));
  ASSERT_EQ(back.knots().size(), m.knots().size());
  for (std::size_t i = 0; i < m.knots().size(); ++i) {
    EXPECT_EQ(back.knots()[i].hz, m.knots()[i].hz);
    EXPECT_EQ(back.knots()[i].threshold, m.knots()[i].threshold);
    EXPECT_EQ(back.knots()[i].exponent, m.knots()[i].exponent);
  }
  EXPECT_EQ(back.reference_gain(), 2.5);
}

TEST(Perception, DefaultModelIsUShapedWithFallingExponent) {
  const auto m = PerceptionModel::default_model();
  EXPECT_LT(m.threshold_at(250.0), m.threshold_at(100.0));
  EXPECT_LT(m.threshold_at(250.0), m.threshold_at(1000.0));
  double prev = m.exponent_at(100.0);
  for (double f = 150.0; f <= 20000.0; f *= 1.5) {
    EXPECT_LE(m.exponent_at(f), prev);
    prev = m.exponent_at(f);
  }
}
