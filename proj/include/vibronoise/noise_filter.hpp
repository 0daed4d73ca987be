#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vibronoise/spectrum.hpp"

namespace vibronoise {

/// How bands leave their initial floor value.
enum class SeedMode {
  floor,              ///< start every band at the floor and rely on the damped update alone
  first_observation,  ///< a band takes the first intensity it observes above the floor
};

std::string to_string(SeedMode mode);
SeedMode parse_seed_mode(const std::string& text);

/// Per-band ego-noise estimate in the perceived-intensity domain.
///
/// While calibrating, each band moves toward the incoming intensity only when
/// the input exceeds it, by a step damped with the square of their ratio:
///   F' = F + (I - F) (F / I)^2     for I > F
/// so an outlier far above the current estimate barely moves it. Once frozen
/// the values never change.
class NoiseFilter {
 public:
  static constexpr double kDefaultFloor = 1e-6;
  static constexpr std::size_t kDeltaHistory = 4096;

  /// All bands start at `floor`. Throws DomainError for a negative floor.
  explicit NoiseFilter(BandScheme scheme = {}, double floor = kDefaultFloor,
                       SeedMode seed = SeedMode::floor);

  const BandScheme& scheme() const noexcept { return scheme_; }
  std::span<const double> values() const noexcept { return values_; }
  double floor() const noexcept { return floor_; }
  std::uint64_t update_count() const noexcept { return update_count_; }
  bool frozen() const noexcept { return frozen_; }
  SeedMode seed_mode() const noexcept { return seed_; }
  const std::deque<double>& recent_deltas() const noexcept { return recent_deltas_; }

  /// Applies one gated update. Returns the largest per-band |dF| / max(F, floor).
  /// Throws StateError when frozen, DomainError on a band-count mismatch.
  double update(const IntensitySpectrum& spectrum);

  /// True once `window` updates have happened and each of the last `window`
  /// recorded deltas is below `epsilon`.
  bool is_converged(std::size_t window, double epsilon) const;

  void freeze() noexcept { frozen_ = true; }

  nlohmann::json save() const;
  /// Validates the document against `expected` (band layout and count).
  static NoiseFilter load(const nlohmann::json& doc, const BandScheme& expected = {});

  /// Test and tooling hook: overwrite band values (must be finite and >= floor).
  void set_values(std::vector<double> values);

 private:
  BandScheme scheme_;
  std::vector<double> values_;
  std::vector<bool> seeded_;
  double floor_;
  SeedMode seed_;
  std::uint64_t update_count_ = 0;
  bool frozen_ = false;
  std::deque<double> recent_deltas_;
};

/// Band-wise max(I - F, 0); keeps the frame index of `s`.
IntensitySpectrum subtract(const IntensitySpectrum& s, const NoiseFilter& filter);
IntensitySpectrum subtract(const IntensitySpectrum& s, std::span<const double> filter_values);

/// One damped update step for a single band.
inline double damped_update(double current, double input) {
  if (!(input > current)) return current;
  const double ratio = current / input;
  const double next = current + (input - current) * ratio * ratio;
  return next < input ? next : input;
}

}  // namespace vibronoise
