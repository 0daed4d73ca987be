#include "vibronoise/spectrum.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"

namespace vibronoise {

BandScheme::BandScheme(double f_lo, double f_hi, double width)
    : f_lo_(f_lo), f_hi_(f_hi), width_(width), count_(0) {
  std::vector<std::string> failures;
  if (!(f_lo >= 0.0) || !std::isfinite(f_lo)) failures.push_back("scheme.f_lo must be >= 0");
  if (!(width > 0.0) || !std::isfinite(width)) failures.push_back("scheme.width must be > 0");
  if (!(f_hi > f_lo) || !std::isfinite(f_hi)) failures.push_back("scheme.f_hi must exceed f_lo");
  if (failures.empty()) {
    const double bands = (f_hi - f_lo) / width;
    const double rounded = std::round(bands);
    if (std::abs(bands - rounded) > 1e-9 * std::max(1.0, bands)) {
      failures.push_back("scheme: (f_hi - f_lo) / width must be an integer");
    } else {
      count_ = static_cast<std::size_t>(rounded);
    }
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));
}

std::optional<std::size_t> BandScheme::band_index(double hz) const noexcept {
  if (!(hz >= f_lo_ && hz < f_hi_)) return std::nullopt;
  const auto i = static_cast<std::size_t>(std::floor((hz - f_lo_) / width_));
  return i < count_ ? std::optional<std::size_t>(i) : std::nullopt;
}

BandScheme load_band_scheme(const nlohmann::json& section) {
  if (section.is_null()) return BandScheme{};
  if (!section.is_object()) throw ValidationError("scheme: section must be an object");
  BandScheme defaults;
  auto get = [&](const char* key, double fallback) {
    auto it = section.find(key);
    if (it == section.end()) return fallback;
    if (!it->is_number()) throw ValidationError(std::string("scheme.") + key + " must be a number");
    return it->get<double>();
  };
  return BandScheme(get("f_lo", defaults.f_lo()), get("f_hi", defaults.f_hi()),
                    get("width", defaults.width()));
}

nlohmann::json to_json(const BandScheme& s) {
  return {{"f_lo", s.f_lo()}, {"f_hi", s.f_hi()}, {"width", s.width()}};
}

IntensitySpectrum frame_spectrum(std::span<const double> window, double sample_rate,
                                 const PerceptionModel& model, const BandScheme& scheme,
                                 const SiftParams& params,
                                 std::vector<ImfComponent>* components) {
  IntensitySpectrum spectrum;
  spectrum.values.assign(scheme.count(), 0.0);
  if (components) components->clear();

  const ImfSet set = decompose(window, params);
  for (const auto& imf : set.imfs) {
    ImfComponent c;
    c.frequency = dominant_frequency(imf, sample_rate);
    c.amplitude = imf_amplitude(imf);
    c.band = scheme.band_index(c.frequency);
    // The intensity model is only defined over its own range.
    if (c.band && c.frequency >= kModelMinHz && c.frequency <= kModelMaxHz) {
      c.intensity = model.perceived_intensity(c.amplitude, c.frequency);
      spectrum.values[*c.band] += c.intensity;
    } else {
      c.band.reset();
    }
    if (components) components->push_back(c);
  }
  return spectrum;
}

double total_intensity(const IntensitySpectrum& s) {
  return std::accumulate(s.values.begin(), s.values.end(), 0.0);
}

}  // namespace vibronoise
