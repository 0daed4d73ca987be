#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vibronoise {

/// Lower and upper edge of the frequency range the intensity model covers, in Hz.
inline constexpr double kModelMinHz = 100.0;
inline constexpr double kModelMaxHz = 20000.0;

/// One row of the coefficient table: detection threshold and intensity exponent at `hz`.
struct PerceptionKnot {
  double hz = 0.0;
  double threshold = 0.0;  ///< signal units
  double exponent = 0.0;
};

/// Frequency-dependent vibrotactile intensity model.
///
/// Perceived intensity of a component with amplitude A at frequency f is
///   I = ((A / AT(f))^2)^alpha(f)
/// where AT(f) is interpolated log-log between knots and alpha(f) is
/// interpolated linearly over log-frequency. Immutable after construction.
class PerceptionModel {
 public:
  /// Validates the knot table. Throws ValidationError listing every violation.
  explicit PerceptionModel(std::vector<PerceptionKnot> knots, double reference_gain = 1.0);

  /// Approximate U-shaped threshold curve (minimum near 250 Hz) with an
  /// exponent that falls with frequency. Not a fitted psychophysical table;
  /// override through the `perception` config section for real use.
  static PerceptionModel default_model();

  const std::vector<PerceptionKnot>& knots() const noexcept { return knots_; }
  double reference_gain() const noexcept { return reference_gain_; }

  double threshold_at(double hz) const;
  double exponent_at(double hz) const;

  double perceived_intensity(double amplitude, double hz) const;
  double amplitude_for_intensity(double intensity, double hz) const;

 private:
  struct Segment {
    double weight;  // position of hz within [knots_[index], knots_[index+1]] on log axis
    std::size_t index;
  };
  Segment locate(double hz) const;

  std::vector<PerceptionKnot> knots_;
  std::vector<double> log_hz_;
  std::vector<double> log_threshold_;
  double reference_gain_;
};

/// Parses and validates a `perception` config section:
///   {"knots": [{"hz":..., "threshold":..., "exponent":...}, ...], "reference_gain": 1.0}
PerceptionModel load_model(const nlohmann::json& section);
nlohmann::json to_json(const PerceptionModel& model);

}  // namespace vibronoise
