#pragma once

#include <cstddef>
#include <vector>

#include "vibronoise/perception.hpp"

namespace vibronoise {

inline constexpr double kDefaultCarrierHz = 200.0;

/// Phase-continuous amplitude-modulated carrier.
struct SynthState {
  double carrier = kDefaultCarrierHz;
  double sample_rate = 48000.0;
  double phase = 0.0;           ///< radians, kept in [0, 2pi)
  double prev_amplitude = 0.0;  ///< envelope value reached at the end of the last frame

  /// Throws ValidationError unless 100 <= carrier < 20000 and sample_rate > 2 * carrier.
  void validate() const;
  double phase_step() const noexcept;
};

struct RenderedFrame {
  std::vector<double> samples;
  std::size_t saturated = 0;  ///< samples clamped to [-1, 1]
};

/// Carrier amplitude whose perceived intensity equals `total_intensity`.
double target_amplitude(const PerceptionModel& model, double total_intensity, double carrier_hz);

/// Renders `n_samples` of the carrier while the envelope ramps linearly from
/// `state.prev_amplitude` to `target`:
///   s[k] = a(k) sin(phase + (k + 1) * step),  a(k) = prev + (target - prev) (k + 1) / n
/// Advances and wraps the phase, and stores `target` as the new envelope value.
RenderedFrame render_frame(SynthState& state, double target, std::size_t n_samples);

}  // namespace vibronoise
