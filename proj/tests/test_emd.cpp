#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vibronoise/emd.hpp"
#include "vibronoise/errors.hpp"

using namespace vibronoise;

namespace {

constexpr double kRate = 48000.0;
constexpr std::size_t kN = 1200;

double reconstruction_error(const std::vector<double>& x, const ImfSet& set) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = set.residual[i];
    for (const auto& imf : set.imfs) s += imf[i];
    num += (s - x[i]) * (s - x[i]);
    den += x[i] * x[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

std::vector<double> random_window(std::mt19937_64& rng, std::size_t n = kN) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

std::vector<double> two_tone(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lo(100.0, 400.0), ratio(4.0, 10.0), amp(0.2, 1.0),
      ph(0.0, oracle::kTwoPi);
  const double f1 = lo(rng);
  const double f2 = std::min(f1 * ratio(rng), 5000.0);
  auto a = oracle::sine(f1, amp(rng), kN, kRate, ph(rng));
  const auto b = oracle::sine(f2, amp(rng), kN, kRate, ph(rng));
  for (std::size_t i = 0; i < kN; ++i) a[i] += b[i];
  return a;
}

std::size_t extrema_count(const std::vector<double>& x) {
  detail::Extrema e;
  detail::find_extrema(x, e);
  return e.maxima.size() + e.minima.size();
}

}  // namespace

TEST(Emd, ConstantWindowHasNoImfs) {
  const std::vector<double> x(kN, 0.37);
  const auto set = decompose(x);
  EXPECT_TRUE(set.imfs.empty());
  EXPECT_EQ(set.residual, x);
}

TEST(Emd, RejectsShortAndNonFiniteWindows) {
  EXPECT_THROW(decompose(std::vector<double>(15, 1.0)), DomainError);
  auto x = oracle::sine(1000.0, 1.0, 64, kRate);
  x[10] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(decompose(x), DomainError);
  x[10] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(decompose(x), DomainError);
  EXPECT_NO_THROW(decompose(std::vector<double>(16, 0.0)));
}

TEST(Emd, PureSineIsCapturedByFirstImf) {
  const auto x = oracle::sine(1000.0, 0.5, kN, kRate);
  const auto set = decompose(x);
  ASSERT_FALSE(set.imfs.empty());
  EXPECT_GT(oracle::correlation(set.imfs[0], x), 0.99);
  EXPECT_LT(oracle::energy(set.residual), 0.01 * oracle::energy(x));
}

TEST(Emd, CompletenessOnRandomWindows) {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<std::size_t> len(16, 2400);
    const auto x = random_window(rng, len(rng));
    EXPECT_LT(reconstruction_error(x, decompose(x)), 1e-9);
  }
}

TEST(Emd, ResidualIsTrendLike) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const auto x = random_window(rng);
    SiftParams p;
    p.max_imfs = 20;
    const auto set = decompose(x, p);
    if (static_cast<int>(set.imfs.size()) == p.max_imfs) continue;
    // Any extrema left are rounding ripple: neighbouring steps at the 1e-12 scale.
    detail::Extrema e;
    detail::find_extrema(set.residual, e);
    if (e.maxima.size() + e.minima.size() < 2) continue;
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    for (const auto& idx : {e.maxima, e.minima}) {
      for (std::size_t i : idx) {
        const double step = std::max(std::abs(set.residual[i] - set.residual[i - 1]),
                                     std::abs(set.residual[i + 1] - set.residual[i]));
        EXPECT_LT(step, 1e-12 * scale) << "window " << t << " index " << i;
      }
    }
  }
}

TEST(Emd, MaxImfsIsRespected) {
  std::mt19937_64 rng(5);
  const auto x = random_window(rng);
  SiftParams p;
  p.max_imfs = 2;
  const auto set = decompose(x, p);
  EXPECT_EQ(set.imfs.size(), 2u);
  EXPECT_LT(reconstruction_error(x, set), 1e-9);
}

TEST(Emd, SiftParamsValidation) {
  SiftParams p;
  EXPECT_NO_THROW(p.validate());
  p.max_imfs = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.max_sift_iterations = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.sd_threshold = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Emd, NonFinalImfsAreBalancedUnlessCapped) {
  // IMFs that hit the iteration cap may be unbalanced; they must stay rare.
  std::mt19937_64 rng(77);
  std::size_t checked = 0, capped = 0;
  const SiftParams p;
  for (int t = 0; t < 200; ++t) {
    const auto x = (t % 2 == 0) ? random_window(rng) : two_tone(rng);
    const auto set = decompose(x, p);
    for (std::size_t k = 0; k + 1 < set.imfs.size(); ++k) {
      ++checked;
      if (set.sift_iterations[k] >= p.max_sift_iterations) {
        ++capped;
        continue;
      }
      const auto& imf = set.imfs[k];
      const auto ext = static_cast<long>(extrema_count(imf));
      const auto zc = static_cast<long>(detail::zero_crossings(imf));
      EXPECT_LE(std::abs(ext - zc), 1) << "window " << t << " imf " << k;
    }
  }
  ASSERT_GT(checked, 0u);
  EXPECT_LT(static_cast<double>(capped) / static_cast<double>(checked), 0.05);
}

TEST(Emd, TwoToneOrderingHighToLow) {
  std::mt19937_64 rng(2024);
  int ordered = 0, pairs = 0;
  for (int t = 0; t < 300; ++t) {
    const auto set = decompose(two_tone(rng));
    ASSERT_GE(set.imfs.size(), 2u);
    ++pairs;
    if (dominant_frequency(set.imfs[0], kRate) >= dominant_frequency(set.imfs[1], kRate)) ++ordered;
  }
  EXPECT_GE(static_cast<double>(ordered) / pairs, 0.95);
}

TEST(Emd, DecompositionIsDeterministic) {
  std::mt19937_64 rng(8);
  const auto x = random_window(rng);
  const auto a = decompose(x), b = decompose(x);
  ASSERT_EQ(a.imfs.size(), b.imfs.size());
  for (std::size_t k = 0; k < a.imfs.size(); ++k) EXPECT_EQ(a.imfs[k], b.imfs[k]);
  EXPECT_EQ(a.residual, b.residual);
}

TEST(Emd, EndpointBoundaryAlsoComplete) {
  std::mt19937_64 rng(3);
  SiftParams p;
  p.boundary = BoundaryMode::endpoint;
  for (int t = 0; t < 20; ++t) {
    const auto x = random_window(rng);
    EXPECT_LT(reconstruction_error(x, decompose(x, p)), 1e-9);
  }
}

TEST(DominantFrequency, MatchesAnalyticCrossingCount) {
  for (double f : {1000.0, 200.0}) {
    const auto x = oracle::sine(f, 1.0, kN, kRate);
    const std::size_t z = oracle::analytic_sine_crossings(f, kN, kRate);
    EXPECT_EQ(detail::sign_changes(x), z);
    EXPECT_DOUBLE_EQ(dominant_frequency(x, kRate), static_cast<double>(z) * kRate / (2.0 * kN));
  }
  EXPECT_EQ(oracle::analytic_sine_crossings(1000.0, kN, kRate), 50u);
  EXPECT_EQ(oracle::analytic_sine_crossings(200.0, kN, kRate), 10u);
  EXPECT_DOUBLE_EQ(dominant_frequency(oracle::sine(1000.0, 1.0, kN, kRate), kRate), 1000.0);
  EXPECT_DOUBLE_EQ(dominant_frequency(oracle::sine(200.0, 1.0, kN, kRate), kRate), 200.0);
}

TEST(DominantFrequency, PhaseShiftedSinesStayWithinTwoCrossings) {
  // Mean removal on a partial period can add or drop one crossing beyond the
  // window-edge quantisation.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ph(0.0, oracle::kTwoPi), fr(150.0, 5000.0);
  for (int t = 0; t < 200; ++t) {
    const double f = fr(rng);
    const auto x = oracle::sine(f, 1.0, kN, kRate, ph(rng));
    const double step = kRate / (2.0 * kN);
    EXPECT_LE(std::abs(dominant_frequency(x, kRate) - f), 2.0 * step + 1e-9) << f;
  }
}

TEST(DominantFrequency, ZeroAndDcGiveZero) {
  EXPECT_EQ(dominant_frequency(std::vector<double>(kN, 0.0), kRate), 0.0);
  EXPECT_EQ(dominant_frequency(std::vector<double>(kN, 2.5), kRate), 0.0);
}

TEST(ImfAmplitude, Examples) {
  EXPECT_NEAR(imf_amplitude(oracle::sine(200.0, 0.3, kN, kRate)), 0.3, 0.003);
  EXPECT_EQ(imf_amplitude(std::vector<double>(kN, 0.0)), 0.0);
  std::vector<double> square(kN);
  for (std::size_t i = 0; i < kN; ++i) square[i] = ((i / 60) % 2 == 0) ? 0.4 : -0.4;
  EXPECT_NEAR(imf_amplitude(square), std::sqrt(2.0) * 0.4, 1e-12);
}

TEST(EmdDetail, PlateauCountsOnceAtCentre) {
  const std::vector<double> x{0, 1, 2, 2, 2, 1, 0, -1, -1, 0};
  detail::Extrema e;
  detail::find_extrema(x, e);
  ASSERT_EQ(e.maxima.size(), 1u);
  EXPECT_EQ(e.maxima[0], 3u);
  ASSERT_EQ(e.minima.size(), 1u);
  EXPECT_TRUE(e.minima[0] == 7u || e.minima[0] == 8u);
}
