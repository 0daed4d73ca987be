#include <chrono>
#include <thread>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vibronoise/errors.hpp"
#include "vibronoise/pipeline.hpp"
#include "vibronoise/scenario.hpp"

using namespace vibronoise;

namespace {

EngineConfig calibration_config() {
  EngineConfig c;
  c.seed = SeedMode::first_observation;
  c.auto_freeze = true;
  return c;
}

RunReport run_buffer(Engine& engine, std::vector<double> samples, BufferSink& sink) {
  BufferSource src(std::move(samples), engine.config().sample_rate);
  return run_stream(engine, src, sink);
}

}  // namespace

TEST(EngineConfig, DerivedSizes) {
  const EngineConfig c;
  EXPECT_EQ(c.hop_samples(), 120u);
  EXPECT_EQ(c.window_samples(), 1200u);
  EngineConfig bad;
  bad.hop_seconds = 0.0;
  bad.convergence_epsilon = -1.0;
  try {
    bad.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_GE(e.failures().size(), 2u);
  }
}

TEST(Engine, SilenceInSilenceOut) {
  Engine e(EngineConfig{});
  const std::vector<double> hop(120, 0.0);
  for (int i = 0; i < 20; ++i) {
    const auto r = e.process_hop(hop);
    ASSERT_EQ(r.output.size(), 120u);
    for (double s : r.output) EXPECT_EQ(s, 0.0);
    EXPECT_EQ(r.stats.input_total_intensity, 0.0);
    EXPECT_EQ(r.stats.target_amplitude, 0.0);
  }
  EXPECT_EQ(e.frames_processed(), 20u);
}

TEST(Engine, WrongHopLengthIsDomainError) {
  Engine e(EngineConfig{});
  EXPECT_THROW(e.process_hop(std::vector<double>(119, 0.0)), DomainError);
}

TEST(Engine, FilterSchemeMustMatch) {
  EXPECT_THROW(Engine(EngineConfig{}, NoiseFilter(BandScheme(100.0, 1000.0, 20.0))),
               ValidationError);
}

TEST(Engine, OutputIsCausal) {
  // A hop's output depends only on samples already seen.
  const auto noise = generate(ego_noise_scenario(0.5), 48000.0);
  auto altered = noise;
  for (std::size_t i = 12000; i < altered.size(); ++i) altered[i] = 0.0;
  EngineConfig c;
  c.mode = Mode::run;
  Engine a(c), b(c);
  BufferSink sa, sb;
  run_buffer(a, noise, sa);
  run_buffer(b, altered, sb);
  for (std::size_t i = 0; i < 12000; ++i) ASSERT_EQ(sa.samples()[i], sb.samples()[i]) << i;
}

TEST(RunStream, OneSecondIsFourHundredHops) {
  Engine e(EngineConfig{});
  BufferSink sink;
  const auto r = run_buffer(e, oracle::sine(300.0, 0.05, 48000, 48000.0), sink);
  EXPECT_EQ(r.frames, 400u);
  EXPECT_EQ(r.input_samples, 48000u);
  EXPECT_EQ(r.output_samples, 48000u);
  EXPECT_EQ(r.padded_samples, 0u);
  EXPECT_EQ(sink.samples().size(), 48000u);
}

TEST(RunStream, PartialHopIsPaddedAndTrimmed) {
  Engine e(EngineConfig{});
  BufferSink sink;
  const auto r = run_buffer(e, std::vector<double>(250, 0.01), sink);
  EXPECT_EQ(r.frames, 3u);
  EXPECT_EQ(r.padded_samples, 110u);
  EXPECT_EQ(sink.samples().size(), 250u);
}

TEST(RunStream, EmptySource) {
  Engine e(EngineConfig{});
  BufferSink sink;
  const auto r = run_buffer(e, {}, sink);
  EXPECT_EQ(r.frames, 0u);
  EXPECT_TRUE(sink.samples().empty());
  EXPECT_FALSE(r.perf.has_value());
}

TEST(RunStream, SampleRateMismatch) {
  Engine e(EngineConfig{});
  BufferSource src(std::vector<double>(480, 0.0), 44100.0);
  BufferSink sink;
  EXPECT_THROW(run_stream(e, src, sink), ValidationError);
}

TEST(RunStream, CalibrationConvergesAndSuppressesNoise) {
  const auto noise = generate(ego_noise_scenario(5.0), 48000.0);
  Engine e(calibration_config());
  BufferSink sink;
  const auto r = run_buffer(e, noise, sink);
  ASSERT_TRUE(r.converged);
  ASSERT_TRUE(r.freeze_frame.has_value());
  EXPECT_LT(*r.freeze_frame, 2000u);
  EXPECT_TRUE(e.filter().frozen());

  // The window is zero-filled until frame 9, so the reference is the first full-window frame.
  const std::size_t full = e.config().window_samples() / e.config().hop_samples() - 1;
  const auto& h = e.history();
  const double first_input = h[full].input_total_intensity;

  // Trend: least-squares slope of the residual up to the freeze is negative.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = full; i <= *r.freeze_frame; ++i, ++n) {
    const double x = static_cast<double>(i), y = h[i].residual_total_intensity;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  EXPECT_LT(n * sxy - sx * sy, 0.0);

  double tail = 0.0;
  std::size_t count = 0;
  for (std::size_t i = *r.freeze_frame + 1; i < h.size(); ++i, ++count)
    tail += h[i].residual_total_intensity;
  ASSERT_GT(count, 0u);
  EXPECT_LT(tail / static_cast<double>(count), 0.05 * first_input);
}

TEST(RunStream, RunModeLeavesFilterUntouched) {
  NoiseFilter f;
  f.set_values(std::vector<double>(995, 0.25));
  EngineConfig c;
  c.mode = Mode::run;
  Engine e(c, f);
  BufferSink sink;
  run_buffer(e, generate(ego_noise_scenario(0.5), 48000.0), sink);
  for (double v : e.filter().values()) EXPECT_EQ(v, 0.25);
  EXPECT_EQ(e.filter().update_count(), 0u);
}

TEST(RunStream, Deterministic) {
  const auto noise = generate(ego_noise_scenario(1.0), 48000.0);
  Engine a(calibration_config()), b(calibration_config());
  BufferSink sa, sb;
  run_buffer(a, noise, sa);
  run_buffer(b, noise, sb);
  EXPECT_EQ(sa.samples(), sb.samples());
  for (std::size_t i = 0; i < 995; ++i) EXPECT_EQ(a.filter().values()[i], b.filter().values()[i]);
}

TEST(PerfReport, StallIsCountedAsMiss) {
  Engine e(EngineConfig{});
  EXPECT_THROW(e.perf_report(), StateError);
  int calls = 0;
  e.set_stall_hook([&] {
    if (++calls == 3) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  });
  const std::vector<double> hop(120, 0.0);
  for (int i = 0; i < 10; ++i) e.process_hop(hop);
  const auto p = e.perf_report();
  EXPECT_EQ(p.frames, 10u);
  EXPECT_GE(p.deadline_misses, 1u);
  EXPECT_LE(p.p95, p.p99);
  EXPECT_LE(p.p99, p.max);
  EXPECT_GE(p.max, 0.005);
  EXPECT_DOUBLE_EQ(p.deadline, 0.0025);
}
