#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vibronoise/config.hpp"
#include "vibronoise/noise_filter.hpp"
#include "vibronoise/pipeline.hpp"

namespace vibronoise {

struct CalibrationResult {
  NoiseFilter filter;
  RunReport report;
  std::vector<FrameStats> frames;
};

/// Calibrates a fresh filter on `noise`. With `auto_freeze` the filter stops
/// adapting once converged; either way it is frozen when the input ends.
CalibrationResult calibrate(EngineConfig config, std::span<const double> noise, bool auto_freeze);

struct ProcessResult {
  std::vector<double> output;
  RunReport report;
  std::vector<FrameStats> frames;
};

/// Runs `input` through a run-mode engine that uses `filter` unchanged.
ProcessResult process(EngineConfig config, const NoiseFilter& filter,
                      std::span<const double> input);

struct AnalysisFrame {
  std::uint64_t frame_index = 0;
  std::vector<double> input;     ///< per band
  std::vector<double> residual;  ///< per band
  double input_total = 0.0;
  double residual_total = 0.0;
  std::optional<double> baseline_residual_total;
};

struct AnalysisResult {
  std::vector<AnalysisFrame> frames;
  std::vector<double> filter_values;
};

/// Per-hop band intensities and residuals under a fixed filter. With
/// `amplitude_baseline` each frame also carries the residual intensity that
/// amplitude-domain subtraction of the same noise estimate would leave: every
/// IMF amplitude minus the filter's equivalent amplitude at that frequency.
AnalysisResult analyze(EngineConfig config, const NoiseFilter& filter,
                       std::span<const double> input, bool amplitude_baseline);

/// Times the engine on `seconds` of the built-in ego-noise scenario.
PerfReport bench(EngineConfig config, double seconds);

// Report writers. Doubles are written in shortest round-trip form.
std::string format_double(double v);
void write_frame_csv(const std::filesystem::path& path, const std::vector<FrameStats>& frames,
                     double hop_seconds);
void write_analysis_csv(const std::filesystem::path& path, const AnalysisResult& result,
                        const BandScheme& scheme, double hop_seconds);
void write_filter_csv(const std::filesystem::path& path, std::span<const double> values,
                      const BandScheme& scheme);
/// Long form `frame_index,band_lo_hz,intensity`, non-zero bands only.
void write_spectrum_csv(const std::filesystem::path& path, const AnalysisResult& result,
                        const BandScheme& scheme);
nlohmann::json to_json(const RunReport& report);
nlohmann::json to_json(const PerfReport& perf);

}  // namespace vibronoise
