#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vibronoise {

enum class ComponentKind { tone, harmonic_stack, broadband, burst };

/// One additive ingredient of a synthetic stimulus. Which fields matter depends on `kind`:
///  - tone:           frequency, amplitude (peak), phase
///  - harmonic_stack: frequency (fundamental), amplitude, harmonics; harmonic k has amplitude/k
///  - broadband:      lo, hi, amplitude (sqrt(2) * RMS over the active span), seed
///  - burst:          frequency, amplitude, decay (e-folding time, 0 = no decay)
/// Every kind honours start and length (length < 0 means "until the end").
struct ScenarioComponent {
  ComponentKind kind = ComponentKind::tone;
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  int harmonics = 1;
  double lo = 0.0;
  double hi = 0.0;
  double decay = 0.0;
  double start = 0.0;
  double length = -1.0;
  std::uint64_t seed = 0;
};

struct ScenarioSpec {
  double duration = 1.0;
  std::vector<ScenarioComponent> components;
};

ScenarioSpec load_scenario(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioSpec& spec);
std::string to_string(ComponentKind kind);

/// Deterministic synthesis of `spec` at `sample_rate`. Throws DomainError for
/// frequencies outside (0, sample_rate / 2) and ValidationError for other bad fields.
std::vector<double> generate(const ScenarioSpec& spec, double sample_rate);

/// Stationary motor-like ego-noise: a 120 Hz harmonic stack over band-limited noise.
ScenarioSpec ego_noise_scenario(double duration, std::uint64_t seed = 7);

}  // namespace vibronoise
