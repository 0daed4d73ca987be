#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vibronoise/emd.hpp"
#include "vibronoise/perception.hpp"

namespace vibronoise {

/// Uniform partition of [f_lo, f_hi) into left-closed bands of `width` Hz.
class BandScheme {
 public:
  BandScheme() : BandScheme(100.0, 20000.0, 20.0) {}
  /// Throws ValidationError unless (f_hi - f_lo) / width is a positive integer.
  BandScheme(double f_lo, double f_hi, double width);

  double f_lo() const noexcept { return f_lo_; }
  double f_hi() const noexcept { return f_hi_; }
  double width() const noexcept { return width_; }
  std::size_t count() const noexcept { return count_; }

  /// Lower edge of band `i`.
  double band_lo(std::size_t i) const noexcept { return f_lo_ + static_cast<double>(i) * width_; }
  double band_center(std::size_t i) const noexcept { return band_lo(i) + 0.5 * width_; }

  std::optional<std::size_t> band_index(double hz) const noexcept;

  friend bool operator==(const BandScheme&, const BandScheme&) = default;

 private:
  double f_lo_;
  double f_hi_;
  double width_;
  std::size_t count_;
};

BandScheme load_band_scheme(const nlohmann::json& section);
nlohmann::json to_json(const BandScheme& scheme);

/// Perceived intensity per band for one frame.
struct IntensitySpectrum {
  std::vector<double> values;
  std::uint64_t frame_index = 0;
};

/// Per-IMF attribution produced while building a spectrum.
struct ImfComponent {
  double frequency = 0.0;
  double amplitude = 0.0;
  double intensity = 0.0;
  std::optional<std::size_t> band;
};

/// Decomposes `window` and accumulates each IMF's perceived intensity into the
/// band of its dominant frequency. IMFs that fall outside the scheme are
/// dropped. `components`, when given, receives the per-IMF attribution.
IntensitySpectrum frame_spectrum(std::span<const double> window, double sample_rate,
                                 const PerceptionModel& model, const BandScheme& scheme,
                                 const SiftParams& params,
                                 std::vector<ImfComponent>* components = nullptr);

double total_intensity(const IntensitySpectrum& s);

}  // namespace vibronoise
