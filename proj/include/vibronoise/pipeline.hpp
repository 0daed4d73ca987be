#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vibronoise/config.hpp"
#include "vibronoise/ism_synth.hpp"
#include "vibronoise/noise_filter.hpp"
#include "vibronoise/spectrum.hpp"

namespace vibronoise {

struct FrameStats {
  std::uint64_t frame_index = 0;
  double input_total_intensity = 0.0;
  double residual_total_intensity = 0.0;
  double filter_max_delta = 0.0;
  double target_amplitude = 0.0;
  double processing_time = 0.0;  ///< seconds, wall clock
  bool deadline_missed = false;
  std::size_t saturation_count = 0;
};

/// Optional per-frame internals, filled on request (analysis tooling).
struct FrameDetail {
  IntensitySpectrum input;
  IntensitySpectrum residual;
  std::vector<ImfComponent> components;
};

struct HopResult {
  std::vector<double> output;
  FrameStats stats;
};

struct PerfReport {
  std::size_t frames = 0;
  double mean = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  double deadline = 0.0;  ///< seconds (one hop)
  std::size_t deadline_misses = 0;
};

/// Streaming ego-noise suppressor for one mono stream.
///
/// Each hop is appended to a sliding analysis window (zero-filled until the
/// first full window arrives). The window's intensity spectrum is compared
/// with the noise filter, which adapts only in calibrate mode, and the total
/// residual intensity is rendered as one hop of the AM carrier. Calls must be
/// made in stream order from a single thread.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  Engine(EngineConfig config, NoiseFilter filter);

  HopResult process_hop(std::span<const double> hop, FrameDetail* detail = nullptr);

  const EngineConfig& config() const noexcept { return config_; }
  const NoiseFilter& filter() const noexcept { return filter_; }
  const SynthState& synth() const noexcept { return synth_; }
  const std::vector<FrameStats>& history() const noexcept { return history_; }
  std::uint64_t frames_processed() const noexcept { return next_frame_; }

  /// Frame index at which the filter froze on convergence, if it did.
  std::optional<std::uint64_t> freeze_frame() const noexcept { return freeze_frame_; }
  bool converged() const;
  void freeze_filter() noexcept { filter_.freeze(); }

  /// Timing summary over every processed hop. Throws StateError before the first hop.
  PerfReport perf_report() const;

  /// Called inside the timed region of every hop; lets tests inject stalls.
  void set_stall_hook(std::function<void()> hook) { stall_hook_ = std::move(hook); }

 private:
  EngineConfig config_;
  NoiseFilter filter_;
  SynthState synth_;
  std::size_t hop_;
  std::vector<double> window_;
  std::uint64_t next_frame_ = 0;
  std::optional<std::uint64_t> freeze_frame_;
  std::vector<FrameStats> history_;
  std::function<void()> stall_hook_;
};

/// Pull-style mono sample source.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual double sample_rate() const = 0;
  /// Fills up to out.size() samples; returns how many were written (0 at end).
  virtual std::size_t read(std::span<double> out) = 0;
};

class SampleSink {
 public:
  virtual ~SampleSink() = default;
  virtual void write(std::span<const double> samples) = 0;
};

class BufferSource final : public SampleSource {
 public:
  BufferSource(std::vector<double> samples, double sample_rate)
      : samples_(std::move(samples)), rate_(sample_rate) {}
  double sample_rate() const override { return rate_; }
  std::size_t read(std::span<double> out) override;

 private:
  std::vector<double> samples_;
  double rate_;
  std::size_t pos_ = 0;
};

class BufferSink final : public SampleSink {
 public:
  void write(std::span<const double> samples) override {
    samples_.insert(samples_.end(), samples.begin(), samples.end());
  }
  const std::vector<double>& samples() const noexcept { return samples_; }
  std::vector<double> take() { return std::move(samples_); }

 private:
  std::vector<double> samples_;
};

struct RunReport {
  std::size_t frames = 0;
  std::size_t input_samples = 0;
  std::size_t output_samples = 0;
  std::size_t padded_samples = 0;  ///< zeros appended to complete the final hop
  bool converged = false;
  std::optional<std::uint64_t> freeze_frame;
  std::optional<PerfReport> perf;
  std::size_t saturation_count = 0;
  double mean_input_intensity = 0.0;
  double mean_residual_intensity = 0.0;
};

/// Feeds `source` through `engine` hop by hop, writing exactly as many samples
/// to `sink` as were read. A trailing partial hop is zero-padded for processing.
/// `on_frame`, when set, sees every hop's stats and (if requested) details.
struct StreamHooks {
  std::function<void(const FrameStats&, const FrameDetail&)> on_frame;
  bool want_detail = false;
};
RunReport run_stream(Engine& engine, SampleSource& source, SampleSink& sink,
                     const StreamHooks& hooks = {});

}  // namespace vibronoise
