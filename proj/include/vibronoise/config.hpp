#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "vibronoise/emd.hpp"
#include "vibronoise/noise_filter.hpp"
#include "vibronoise/perception.hpp"
#include "vibronoise/spectrum.hpp"

namespace vibronoise {

enum class Mode { calibrate, run };

/// Everything an Engine needs. Loaded from a JSON document with the sections
/// `pipeline`, `emd`, `perception`, `filter` and `synth`; every field is optional.
struct EngineConfig {
  double sample_rate = 48000.0;
  double hop_seconds = 0.0025;
  double window_seconds = 0.025;
  Mode mode = Mode::calibrate;
  std::size_t convergence_window = 40;
  double convergence_epsilon = 0.01;
  bool auto_freeze = false;

  SiftParams emd;
  PerceptionModel model = PerceptionModel::default_model();

  BandScheme scheme;
  double filter_floor = NoiseFilter::kDefaultFloor;
  SeedMode seed = SeedMode::floor;

  double carrier_hz = 200.0;

  std::size_t hop_samples() const;
  std::size_t window_samples() const;

  /// Throws ValidationError listing every violated constraint.
  void validate() const;
};

EngineConfig load_config(const nlohmann::json& doc);
EngineConfig load_config_file(const std::filesystem::path& path);
nlohmann::json to_json(const EngineConfig& config);

std::string to_string(Mode mode);

/// Reads a whole file as JSON. Throws IoError when unreadable, ValidationError when malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace vibronoise
