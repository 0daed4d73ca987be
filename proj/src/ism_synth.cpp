#include "vibronoise/ism_synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void SynthState::validate() const {
  std::vector<std::string> failures;
  if (!(carrier >= kModelMinHz && carrier < kModelMaxHz))
    failures.push_back("synth.carrier_hz must lie in [100, 20000)");
  if (!(sample_rate > 2.0 * carrier)) failures.push_back("sample_rate must exceed 2 * carrier");
  if (!std::isfinite(phase)) failures.push_back("synth phase must be finite");
  if (!failures.empty()) throw ValidationError(std::move(failures));
}

double SynthState::phase_step() const noexcept { return kTwoPi * carrier / sample_rate; }

double target_amplitude(const PerceptionModel& model, double total_intensity, double carrier_hz) {
  return model.amplitude_for_intensity(total_intensity, carrier_hz);
}

RenderedFrame render_frame(SynthState& state, double target, std::size_t n_samples) {
  if (n_samples == 0) throw DomainError("render_frame needs at least one sample");
  if (!(target >= 0.0) || !std::isfinite(target)) {
    throw DomainError("render_frame target amplitude must be finite and >= 0");
  }
  RenderedFrame out;
  out.samples.resize(n_samples);
  const double step = state.phase_step();
  const double start = state.prev_amplitude;
  const double slope = (target - start) / static_cast<double>(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double kk = static_cast<double>(k + 1);
    const double a = k + 1 == n_samples ? target : start + slope * kk;
    double s = a * std::sin(state.phase + kk * step);
    if (s > 1.0 || s < -1.0) {
      s = s > 1.0 ? 1.0 : -1.0;
      ++out.saturated;
    }
    out.samples[k] = s;
  }
  state.phase = std::fmod(state.phase + static_cast<double>(n_samples) * step, kTwoPi);
  if (state.phase < 0.0) state.phase += kTwoPi;
  state.prev_amplitude = target;
  return out;
}

}  // namespace vibronoise
