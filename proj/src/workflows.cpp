#include "vibronoise/workflows.hpp"

#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"
#include "vibronoise/scenario.hpp"

namespace vibronoise {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string band_label(const BandScheme& scheme, std::size_t b) {
  return format_double(scheme.band_lo(b));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CalibrationResult calibrate(EngineConfig config, std::span<const double> noise, bool auto_freeze) {
  config.mode = Mode::calibrate;
  config.auto_freeze = config.auto_freeze || auto_freeze;
  Engine engine(config);
  BufferSource source({noise.begin(), noise.end()}, config.sample_rate);
  BufferSink sink;
  RunReport report = run_stream(engine, source, sink);
  engine.freeze_filter();
  return {engine.filter(), report, engine.history()};
}

ProcessResult process(EngineConfig config, const NoiseFilter& filter,
                      std::span<const double> input) {
  config.mode = Mode::run;
  Engine engine(config, filter);
  BufferSource source({input.begin(), input.end()}, config.sample_rate);
  BufferSink sink;
  RunReport report = run_stream(engine, source, sink);
  return {sink.take(), report, engine.history()};
}

AnalysisResult analyze(EngineConfig config, const NoiseFilter& filter,
                       std::span<const double> input, bool amplitude_baseline) {
  config.mode = Mode::run;
  Engine engine(config, filter);
  BufferSource source({input.begin(), input.end()}, config.sample_rate);
  BufferSink sink;
  AnalysisResult result;
  const auto values = filter.values();
  result.filter_values.assign(values.begin(), values.end());

  StreamHooks hooks;
  hooks.want_detail = true;
  hooks.on_frame = [&](const FrameStats& st, const FrameDetail& d) {
    AnalysisFrame f;
    f.frame_index = st.frame_index;
    f.input = d.input.values;
    f.residual = d.residual.values;
    f.input_total = st.input_total_intensity;
    f.residual_total = st.residual_total_intensity;
    if (amplitude_baseline) {
      double total = 0.0;
      for (const auto& c : d.components) {
        if (!c.band) continue;
        const double noise_amp = config.model.amplitude_for_intensity(values[*c.band], c.frequency);
        const double left = std::max(c.amplitude - noise_amp, 0.0);
        total += config.model.perceived_intensity(left, c.frequency);
      }
      f.baseline_residual_total = total;
    }
    result.frames.push_back(std::move(f));
  };
  run_stream(engine, source, sink, hooks);
  return result;
}

PerfReport bench(EngineConfig config, double seconds) {
  if (!(seconds > 0.0)) throw ValidationError("bench: --seconds must be > 0");
  const auto input = generate(ego_noise_scenario(seconds), config.sample_rate);
  Engine engine(config);
  const std::size_t hop = config.hop_samples();
  for (std::size_t i = 0; i + hop <= input.size(); i += hop) {
    engine.process_hop(std::span<const double>(input).subspan(i, hop));
  }
  return engine.perf_report();
}

void write_frame_csv(const std::filesystem::path& path, const std::vector<FrameStats>& frames,
                     double hop_seconds) {
  auto out = open_output(path);
  out << "frame_index,t_sec,input_intensity,residual_intensity,filter_max_delta,proc_us,missed\n";
  for (const auto& f : frames) {
    out << f.frame_index << ',' << format_double(static_cast<double>(f.frame_index) * hop_seconds)
        << ',' << format_double(f.input_total_intensity) << ','
        << format_double(f.residual_total_intensity) << ',' << format_double(f.filter_max_delta)
        << ',' << format_double(f.processing_time * 1e6) << ',' << (f.deadline_missed ? 1 : 0)
        << '\n';
  }
  finish(out, path);
}

void write_analysis_csv(const std::filesystem::path& path, const AnalysisResult& result,
                        const BandScheme& scheme, double hop_seconds) {
  auto out = open_output(path);
  const bool baseline =
      !result.frames.empty() && result.frames.front().baseline_residual_total.has_value();
  out << "frame_index,t_sec,input_total,residual_total";
  if (baseline) out << ",baseline_residual_total";
  for (std::size_t b = 0; b < scheme.count(); ++b) out << ",in_" << band_label(scheme, b);
  for (std::size_t b = 0; b < scheme.count(); ++b) out << ",res_" << band_label(scheme, b);
  out << '\n';
  for (const auto& f : result.frames) {
    out << f.frame_index << ',' << format_double(static_cast<double>(f.frame_index) * hop_seconds)
        << ',' << format_double(f.input_total) << ',' << format_double(f.residual_total);
    if (baseline) out << ',' << format_double(f.baseline_residual_total.value_or(0.0));
    for (double v : f.input) out << ',' << format_double(v);
    for (double v : f.residual) out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

void write_filter_csv(const std::filesystem::path& path, std::span<const double> values,
                      const BandScheme& scheme) {
  auto out = open_output(path);
  out << "band_lo_hz,filter\n";
  for (std::size_t b = 0; b < values.size(); ++b) {
    out << band_label(scheme, b) << ',' << format_double(values[b]) << '\n';
  }
  finish(out, path);
}

void write_spectrum_csv(const std::filesystem::path& path, const AnalysisResult& result,
                        const BandScheme& scheme) {
  auto out = open_output(path);
  out << "frame_index,band_lo_hz,intensity\n";
  for (const auto& f : result.frames) {
    for (std::size_t b = 0; b < f.input.size(); ++b) {
      if (f.input[b] == 0.0) continue;
      out << f.frame_index << ',' << band_label(scheme, b) << ',' << format_double(f.input[b])
          << '\n';
    }
  }
  finish(out, path);
}

nlohmann::json to_json(const PerfReport& p) {
  return {{"frames", p.frames},         {"mean_us", p.mean * 1e6}, {"p95_us", p.p95 * 1e6},
          {"p99_us", p.p99 * 1e6},      {"max_us", p.max * 1e6},   {"deadline_us", p.deadline * 1e6},
          {"deadline_misses", p.deadline_misses}};
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j = {{"format", "vibronoise.run_report"},
                      {"version", 1},
                      {"frames", r.frames},
                      {"input_samples", r.input_samples},
                      {"output_samples", r.output_samples},
                      {"padded_samples", r.padded_samples},
                      {"converged", r.converged},
                      {"saturation_count", r.saturation_count},
                      {"mean_input_intensity", r.mean_input_intensity},
                      {"mean_residual_intensity", r.mean_residual_intensity}};
  j["freeze_frame"] = r.freeze_frame ? nlohmann::json(*r.freeze_frame) : nlohmann::json(nullptr);
  j["perf"] = r.perf ? to_json(*r.perf) : nlohmann::json(nullptr);
  return j;
}

}  // namespace vibronoise
