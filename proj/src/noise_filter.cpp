#include "vibronoise/noise_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {
constexpr const char* kFormat = "vibronoise.noise_filter";
constexpr int kVersion = 1;
}  // namespace

std::string to_string(SeedMode mode) {
  return mode == SeedMode::floor ? "floor" : "first_observation";
}

SeedMode parse_seed_mode(const std::string& text) {
  if (text == "floor") return SeedMode::floor;
  if (text == "first_observation" || text == "first_frame") return SeedMode::first_observation;
  throw ValidationError("filter.seed must be \"floor\" or \"first_observation\", got \"" + text +
                        "\"");
}

NoiseFilter::NoiseFilter(BandScheme scheme, double floor, SeedMode seed)
    : scheme_(scheme), floor_(floor), seed_(seed) {
  if (!(floor >= 0.0) || !std::isfinite(floor)) {
    throw DomainError("noise filter floor must be finite and >= 0");
  }
  values_.assign(scheme_.count(), floor_);
  seeded_.assign(scheme_.count(), false);
}

double NoiseFilter::update(const IntensitySpectrum& spectrum) {
  if (frozen_) throw StateError("noise filter is frozen");
  if (spectrum.values.size() != values_.size()) {
    throw DomainError("spectrum has " + std::to_string(spectrum.values.size()) +
                      " bands, filter has " + std::to_string(values_.size()));
  }
  double max_delta = 0.0;
  for (std::size_t b = 0; b < values_.size(); ++b) {
    const double current = values_[b];
    const double input = spectrum.values[b];
    double next = current;
    if (seed_ == SeedMode::first_observation && !seeded_[b]) {
      if (input > current) {
        next = input;
        seeded_[b] = true;
      }
    } else {
      next = damped_update(current, input);
    }
    if (next != current) {
      const double scale = std::max(current, floor_);
      const double delta = scale > 0.0 ? std::abs(next - current) / scale
                                       : std::numeric_limits<double>::infinity();
      max_delta = std::max(max_delta, delta);
      values_[b] = next;
    }
  }
  ++update_count_;
  recent_deltas_.push_back(max_delta);
  if (recent_deltas_.size() > kDeltaHistory) recent_deltas_.pop_front();
  return max_delta;
}

bool NoiseFilter::is_converged(std::size_t window, double epsilon) const {
  if (window == 0 || update_count_ < window || recent_deltas_.size() < window) return false;
  return std::all_of(recent_deltas_.end() - static_cast<std::ptrdiff_t>(window),
                     recent_deltas_.end(), [&](double d) { return d < epsilon; });
}

void NoiseFilter::set_values(std::vector<double> values) {
  if (values.size() != values_.size()) throw DomainError("set_values: band count mismatch");
  for (double v : values) {
    if (!std::isfinite(v) || v < floor_) throw DomainError("set_values: value below floor");
  }
  values_ = std::move(values);
  for (std::size_t b = 0; b < values_.size(); ++b) seeded_[b] = values_[b] > floor_;
}

nlohmann::json NoiseFilter::save() const {
  return {{"format", kFormat},
          {"version", kVersion},
          {"scheme", to_json(scheme_)},
          {"floor", floor_},
          {"seed", to_string(seed_)},
          {"update_count", update_count_},
          {"frozen", frozen_},
          {"values", values_}};
}

NoiseFilter NoiseFilter::load(const nlohmann::json& doc, const BandScheme& expected) {
  std::vector<std::string> failures;
  if (!doc.is_object()) throw ValidationError("filter document must be an object");
  if (doc.value("format", std::string()) != kFormat)
    failures.push_back(std::string("filter.format must be \"") + kFormat + "\"");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kVersion)
    failures.push_back("filter.version must be 1");
  for (const char* key : {"scheme", "floor", "update_count", "values"}) {
    if (!doc.contains(key)) failures.push_back(std::string("filter.") + key + " missing");
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));

  const BandScheme scheme = load_band_scheme(doc["scheme"]);
  if (!(scheme == expected)) failures.push_back("filter.scheme does not match the configured band scheme");
  if (!doc["floor"].is_number()) failures.push_back("filter.floor must be a number");
  if (!doc["update_count"].is_number_unsigned())
    failures.push_back("filter.update_count must be a non-negative integer");
  const auto& values = doc["values"];
  if (!values.is_array()) {
    failures.push_back("filter.values must be an array");
  } else if (values.size() != expected.count()) {
    failures.push_back("filter.values has " + std::to_string(values.size()) + " bands, expected " +
                       std::to_string(expected.count()));
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));

  const double floor = doc["floor"].get<double>();
  if (!(floor >= 0.0) || !std::isfinite(floor)) throw ValidationError("filter.floor must be >= 0");
  SeedMode seed = SeedMode::floor;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_string()) throw ValidationError("filter.seed must be a string");
    seed = parse_seed_mode(doc["seed"].get<std::string>());
  }

  std::vector<double> v;
  v.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_number()) {
      failures.push_back("filter.values[" + std::to_string(i) + "] is not a number");
      continue;
    }
    const double x = values[i].get<double>();
    if (!std::isfinite(x) || x < floor)
      failures.push_back("filter.values[" + std::to_string(i) + "] must be finite and >= floor");
    v.push_back(x);
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));

  NoiseFilter filter(scheme, floor, seed);
  filter.set_values(std::move(v));
  filter.update_count_ = doc["update_count"].get<std::uint64_t>();
  filter.frozen_ = doc.value("frozen", false);
  return filter;
}

IntensitySpectrum subtract(const IntensitySpectrum& s, std::span<const double> filter_values) {
  if (s.values.size() != filter_values.size()) {
    throw DomainError("subtract: spectrum and filter band counts differ");
  }
  IntensitySpectrum out;
  out.frame_index = s.frame_index;
  out.values.resize(s.values.size());
  for (std::size_t b = 0; b < s.values.size(); ++b) {
    out.values[b] = std::max(s.values[b] - filter_values[b], 0.0);
  }
  return out;
}

IntensitySpectrum subtract(const IntensitySpectrum& s, const NoiseFilter& filter) {
  return subtract(s, filter.values());
}

}  // namespace vibronoise
