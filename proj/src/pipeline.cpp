#include "vibronoise/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {

double percentile(const std::vector<double>& sorted, double p) {
  // Nearest-rank.
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

}  // namespace

Engine::Engine(EngineConfig config)
    : Engine(config, NoiseFilter(config.scheme, config.filter_floor, config.seed)) {}

Engine::Engine(EngineConfig config, NoiseFilter filter)
    : config_(std::move(config)), filter_(std::move(filter)) {
  config_.validate();
  if (!(filter_.scheme() == config_.scheme)) {
    throw ValidationError("noise filter band scheme does not match the configured scheme");
  }
  synth_.carrier = config_.carrier_hz;
  synth_.sample_rate = config_.sample_rate;
  synth_.validate();
  hop_ = config_.hop_samples();
  window_.assign(config_.window_samples(), 0.0);
}

bool Engine::converged() const {
  return filter_.is_converged(config_.convergence_window, config_.convergence_epsilon);
}

HopResult Engine::process_hop(std::span<const double> hop, FrameDetail* detail) {
  if (hop.size() != hop_) {
    throw DomainError("hop must contain " + std::to_string(hop_) + " samples, got " +
                      std::to_string(hop.size()));
  }
  const auto started = std::chrono::steady_clock::now();

  std::move(window_.begin() + static_cast<std::ptrdiff_t>(hop_), window_.end(), window_.begin());
  std::copy(hop.begin(), hop.end(), window_.end() - static_cast<std::ptrdiff_t>(hop_));

  HopResult result;
  FrameStats& st = result.stats;
  st.frame_index = next_frame_;

  std::vector<ImfComponent>* components = detail ? &detail->components : nullptr;
  IntensitySpectrum input =
      frame_spectrum(window_, config_.sample_rate, config_.model, config_.scheme, config_.emd,
                     components);
  input.frame_index = next_frame_;

  if (config_.mode == Mode::calibrate && !filter_.frozen()) {
    st.filter_max_delta = filter_.update(input);
    if (config_.auto_freeze && converged()) {
      filter_.freeze();
      freeze_frame_ = next_frame_;
    }
  }
  IntensitySpectrum residual = subtract(input, filter_);

  st.input_total_intensity = total_intensity(input);
  st.residual_total_intensity = total_intensity(residual);
  st.target_amplitude = target_amplitude(config_.model, st.residual_total_intensity, synth_.carrier);

  RenderedFrame rendered = render_frame(synth_, st.target_amplitude, hop_);
  st.saturation_count = rendered.saturated;
  result.output = std::move(rendered.samples);

  if (stall_hook_) stall_hook_();
  const auto elapsed = std::chrono::steady_clock::now() - started;
  st.processing_time = std::chrono::duration<double>(elapsed).count();
  st.deadline_missed = st.processing_time > config_.hop_seconds;

  if (detail) {
    detail->input = std::move(input);
    detail->residual = std::move(residual);
  }
  history_.push_back(st);
  ++next_frame_;
  return result;
}

PerfReport Engine::perf_report() const {
  if (history_.empty()) throw StateError("perf_report: no frames processed");
  std::vector<double> times;
  times.reserve(history_.size());
  PerfReport r;
  double sum = 0.0;
  for (const auto& s : history_) {
    times.push_back(s.processing_time);
    sum += s.processing_time;
    if (s.deadline_missed) ++r.deadline_misses;
  }
  std::sort(times.begin(), times.end());
  r.frames = times.size();
  r.mean = sum / static_cast<double>(times.size());
  r.p95 = percentile(times, 0.95);
  r.p99 = percentile(times, 0.99);
  r.max = times.back();
  r.deadline = config_.hop_seconds;
  return r;
}

std::size_t BufferSource::read(std::span<double> out) {
  const std::size_t n = std::min(out.size(), samples_.size() - pos_);
  std::copy_n(samples_.begin() + static_cast<std::ptrdiff_t>(pos_), n, out.begin());
  pos_ += n;
  return n;
}

RunReport run_stream(Engine& engine, SampleSource& source, SampleSink& sink,
                     const StreamHooks& hooks) {
  if (source.sample_rate() != engine.config().sample_rate) {
    throw ValidationError("source sample_rate " + std::to_string(source.sample_rate()) +
                          " Hz does not match engine sample_rate " +
                          std::to_string(engine.config().sample_rate) + " Hz");
  }
  const std::size_t hop = engine.config().hop_samples();
  RunReport report;
  std::vector<double> buffer(hop);
  FrameDetail detail;
  const std::size_t first_frame = engine.history().size();
  double input_sum = 0.0, residual_sum = 0.0;

  for (;;) {
    std::size_t got = 0;
    while (got < hop) {
      const std::size_t n = source.read(std::span<double>(buffer).subspan(got));
      if (n == 0) break;
      got += n;
    }
    if (got == 0) break;
    if (got < hop) {
      std::fill(buffer.begin() + static_cast<std::ptrdiff_t>(got), buffer.end(), 0.0);
      report.padded_samples = hop - got;
    }
    HopResult r = engine.process_hop(buffer, hooks.want_detail ? &detail : nullptr);
    sink.write(std::span<const double>(r.output).first(got));
    report.input_samples += got;
    report.output_samples += got;
    report.saturation_count += r.stats.saturation_count;
    input_sum += r.stats.input_total_intensity;
    residual_sum += r.stats.residual_total_intensity;
    ++report.frames;
    if (hooks.on_frame) hooks.on_frame(r.stats, detail);
    if (got < hop) break;
  }

  report.converged = engine.converged() || engine.freeze_frame().has_value();
  report.freeze_frame = engine.freeze_frame();
  if (report.frames > 0) {
    report.mean_input_intensity = input_sum / static_cast<double>(report.frames);
    report.mean_residual_intensity = residual_sum / static_cast<double>(report.frames);
    if (engine.history().size() > first_frame) report.perf = engine.perf_report();
  }
  return report;
}

}  // namespace vibronoise
