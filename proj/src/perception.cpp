#include "vibronoise/perception.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {

void check_frequency(double hz) {
  if (!(hz >= kModelMinHz && hz <= kModelMaxHz)) {
    throw DomainError("frequency " + std::to_string(hz) + " Hz outside [100, 20000] Hz");
  }
}

std::vector<std::string> validate_knots(const std::vector<PerceptionKnot>& knots,
                                        double reference_gain) {
  std::vector<std::string> failures;
  if (knots.size() < 2) failures.push_back("perception model needs at least 2 knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    const std::string where = "knot " + std::to_string(i);
    if (!std::isfinite(k.hz) || k.hz <= 0.0) failures.push_back(where + ": hz must be positive");
    if (!std::isfinite(k.threshold) || k.threshold <= 0.0)
      failures.push_back(where + ": threshold must be > 0");
    if (!std::isfinite(k.exponent) || k.exponent <= 0.0)
      failures.push_back(where + ": exponent must be > 0");
    if (i > 0 && !(k.hz > knots[i - 1].hz))
      failures.push_back(where + ": hz not strictly increasing");
  }
  if (!knots.empty()) {
    if (!(knots.front().hz <= kModelMinHz))
      failures.push_back("knot 0: first knot must be <= 100 Hz (coverage gap)");
    if (!(knots.back().hz >= kModelMaxHz))
      failures.push_back("knot " + std::to_string(knots.size() - 1) +
                         ": last knot must be >= 20000 Hz (coverage gap)");
  }
  if (!std::isfinite(reference_gain) || reference_gain <= 0.0)
    failures.push_back("reference_gain must be > 0");
  return failures;
}

}  // namespace

PerceptionModel::PerceptionModel(std::vector<PerceptionKnot> knots, double reference_gain)
    : knots_(std::move(knots)), reference_gain_(reference_gain) {
  if (auto failures = validate_knots(knots_, reference_gain_); !failures.empty()) {
    throw ValidationError(std::move(failures));
  }
  log_hz_.reserve(knots_.size());
  log_threshold_.reserve(knots_.size());
  for (const auto& k : knots_) {
    log_hz_.push_back(std::log(k.hz));
    log_threshold_.push_back(std::log(k.threshold));
  }
}

PerceptionModel PerceptionModel::default_model() {
  // Shape follows the classic Pacinian threshold curve; magnitudes are in
  // normalized signal units and are an approximation, not measured data.
  return PerceptionModel({
      {100.0, 0.020, 0.60},
      {250.0, 0.005, 0.55},
      {500.0, 0.012, 0.50},
      {1000.0, 0.040, 0.45},
      {2000.0, 0.100, 0.42},
      {5000.0, 0.300, 0.40},
      {10000.0, 0.600, 0.38},
      {20000.0, 1.000, 0.35},
  });
}

PerceptionModel::Segment PerceptionModel::locate(double hz) const {
  check_frequency(hz);
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), hz,
                                   [](double f, const PerceptionKnot& k) { return f < k.hz; });
  if (it == knots_.begin()) return {0.0, 0};  // unreachable after validation
  std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  if (hi == knots_.size()) return {1.0, knots_.size() - 2};  // hz == last knot
  const std::size_t lo = hi - 1;
  if (hz == knots_[lo].hz) return {0.0, lo};
  const double w = (std::log(hz) - log_hz_[lo]) / (log_hz_[hi] - log_hz_[lo]);
  return {w, lo};
}

double PerceptionModel::threshold_at(double hz) const {
  const auto [w, i] = locate(hz);
  if (w == 0.0) return knots_[i].threshold;
  if (w == 1.0) return knots_[i + 1].threshold;
  return std::exp(log_threshold_[i] + w * (log_threshold_[i + 1] - log_threshold_[i]));
}

double PerceptionModel::exponent_at(double hz) const {
  const auto [w, i] = locate(hz);
  if (w == 0.0) return knots_[i].exponent;
  if (w == 1.0) return knots_[i + 1].exponent;
  return knots_[i].exponent + w * (knots_[i + 1].exponent - knots_[i].exponent);
}

double PerceptionModel::perceived_intensity(double amplitude, double hz) const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("amplitude must be finite and non-negative");
  }
  const double ratio = amplitude / threshold_at(hz);
  return std::pow(ratio, 2.0 * exponent_at(hz));
}

double PerceptionModel::amplitude_for_intensity(double intensity, double hz) const {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw DomainError("intensity must be finite and non-negative");
  }
  return threshold_at(hz) * std::pow(intensity, 1.0 / (2.0 * exponent_at(hz)));
}

PerceptionModel load_model(const nlohmann::json& section) {
  std::vector<std::string> failures;
  if (!section.is_object()) throw ValidationError("perception: section must be an object");
  const auto knots_it = section.find("knots");
  if (knots_it == section.end() || !knots_it->is_array()) {
    throw ValidationError("perception: missing array 'knots'");
  }
  std::vector<PerceptionKnot> knots;
  for (std::size_t i = 0; i < knots_it->size(); ++i) {
    const auto& row = (*knots_it)[i];
    PerceptionKnot k;
    bool ok = row.is_object();
    for (const char* field : {"hz", "threshold", "exponent"}) {
      if (!ok || !row.contains(field) || !row[field].is_number()) {
        failures.push_back("knot " + std::to_string(i) + ": missing numeric '" + field + "'");
        ok = false;
      }
    }
    if (ok) {
      k.hz = row["hz"].get<double>();
      k.threshold = row["threshold"].get<double>();
      k.exponent = row["exponent"].get<double>();
    }
    knots.push_back(k);
  }
  double gain = 1.0;
  if (auto g = section.find("reference_gain"); g != section.end()) {
    if (g->is_number()) {
      gain = g->get<double>();
    } else {
      failures.push_back("reference_gain must be a number");
    }
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));
  return PerceptionModel(std::move(knots), gain);
}

nlohmann::json to_json(const PerceptionModel& model) {
  nlohmann::json knots = nlohmann::json::array();
  for (const auto& k : model.knots()) {
    knots.push_back({{"hz", k.hz}, {"threshold", k.threshold}, {"exponent", k.exponent}});
  }
  return {{"knots", std::move(knots)}, {"reference_gain", model.reference_gain()}};
}

}  // namespace vibronoise
