#include "vibronoise/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kBandpassTaps = 511;

struct Span {
  std::size_t begin;
  std::size_t end;
};

Span active_span(const ScenarioComponent& c, std::size_t total, double rate) {
  const auto begin = std::min(total, static_cast<std::size_t>(std::llround(c.start * rate)));
  std::size_t end = total;
  if (c.length >= 0.0) {
    end = std::min(total, begin + static_cast<std::size_t>(std::llround(c.length * rate)));
  }
  return {begin, end};
}

void check_frequency(double hz, double rate, const std::string& what) {
  if (!(hz > 0.0 && hz < rate / 2.0)) {
    throw DomainError(what + " " + std::to_string(hz) + " Hz outside (0, " +
                      std::to_string(rate / 2.0) + ") Hz");
  }
}

// Blackman-windowed sinc band-pass, unity gain at the band centre.
std::vector<double> bandpass_taps(double lo, double hi, double rate) {
  std::vector<double> h(kBandpassTaps);
  const double mid = (kBandpassTaps - 1) / 2.0;
  const double f1 = lo / rate, f2 = hi / rate;
  for (std::size_t n = 0; n < kBandpassTaps; ++n) {
    const double m = static_cast<double>(n) - mid;
    const double ideal = m == 0.0 ? 2.0 * (f2 - f1)
                                  : (std::sin(kTwoPi * f2 * m) - std::sin(kTwoPi * f1 * m)) /
                                        (std::numbers::pi * m);
    const double x = static_cast<double>(n) / (kBandpassTaps - 1);
    const double w = 0.42 - 0.5 * std::cos(kTwoPi * x) + 0.08 * std::cos(2.0 * kTwoPi * x);
    h[n] = ideal * w;
  }
  return h;
}

void add_broadband(const ScenarioComponent& c, Span s, double rate, std::vector<double>& out) {
  const std::size_t n = s.end - s.begin;
  if (n == 0 || c.amplitude == 0.0) return;
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(n + kBandpassTaps - 1);
  for (auto& w : white) w = gauss(rng);
  const auto taps = bandpass_taps(c.lo, c.hi, rate);
  std::vector<double> band(n, 0.0);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* x = white.data() + i;
    for (std::size_t k = 0; k < kBandpassTaps; ++k) acc += taps[k] * x[k];
    band[i] = acc;
    sum_sq += acc * acc;
  }
  const double peak_equiv = std::sqrt(2.0 * sum_sq / static_cast<double>(n));
  if (peak_equiv == 0.0) return;
  const double gain = c.amplitude / peak_equiv;
  for (std::size_t i = 0; i < n; ++i) out[s.begin + i] += gain * band[i];
}

ComponentKind parse_kind(const std::string& k) {
  if (k == "tone") return ComponentKind::tone;
  if (k == "harmonic_stack") return ComponentKind::harmonic_stack;
  if (k == "broadband") return ComponentKind::broadband;
  if (k == "burst") return ComponentKind::burst;
  throw ValidationError("scenario: unknown component kind \"" + k + "\"");
}

void validate(const ScenarioSpec& spec, double rate) {
  std::vector<std::string> failures;
  if (!(spec.duration > 0.0) || !std::isfinite(spec.duration))
    failures.push_back("scenario.duration must be > 0");
  if (!(rate > 0.0)) failures.push_back("sample_rate must be > 0");
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    const std::string where = "components[" + std::to_string(i) + "]";
    if (!(c.amplitude >= 0.0 && c.amplitude <= 1.0))
      failures.push_back(where + ".amplitude must lie in [0, 1]");
    if (!(c.start >= 0.0)) failures.push_back(where + ".start must be >= 0");
    if (c.kind == ComponentKind::harmonic_stack && c.harmonics < 1)
      failures.push_back(where + ".harmonics must be >= 1");
    if (c.kind == ComponentKind::burst && !(c.decay >= 0.0))
      failures.push_back(where + ".decay must be >= 0");
    if (c.kind == ComponentKind::broadband && !(c.hi > c.lo))
      failures.push_back(where + ".hi must exceed lo");
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));
}

}  // namespace

std::string to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::tone: return "tone";
    case ComponentKind::harmonic_stack: return "harmonic_stack";
    case ComponentKind::broadband: return "broadband";
    case ComponentKind::burst: return "burst";
  }
  return "tone";
}

std::vector<double> generate(const ScenarioSpec& spec, double sample_rate) {
  validate(spec, sample_rate);
  const auto total = static_cast<std::size_t>(std::llround(spec.duration * sample_rate));
  std::vector<double> out(total, 0.0);
  for (const auto& c : spec.components) {
    const Span s = active_span(c, total, sample_rate);
    switch (c.kind) {
      case ComponentKind::tone: {
        check_frequency(c.frequency, sample_rate, "tone frequency");
        const double w = kTwoPi * c.frequency / sample_rate;
        for (std::size_t i = s.begin; i < s.end; ++i)
          out[i] += c.amplitude * std::sin(w * static_cast<double>(i) + c.phase);
        break;
      }
      case ComponentKind::harmonic_stack: {
        check_frequency(c.frequency, sample_rate, "harmonic_stack fundamental");
        for (int k = 1; k <= c.harmonics; ++k) {
          const double f = c.frequency * k;
          if (f >= sample_rate / 2.0) break;
          const double w = kTwoPi * f / sample_rate;
          const double a = c.amplitude / k;
          for (std::size_t i = s.begin; i < s.end; ++i)
            out[i] += a * std::sin(w * static_cast<double>(i));
        }
        break;
      }
      case ComponentKind::broadband:
        check_frequency(c.lo, sample_rate, "broadband lo");
        check_frequency(c.hi, sample_rate, "broadband hi");
        add_broadband(c, s, sample_rate, out);
        break;
      case ComponentKind::burst: {
        check_frequency(c.frequency, sample_rate, "burst frequency");
        const double w = kTwoPi * c.frequency / sample_rate;
        for (std::size_t i = s.begin; i < s.end; ++i) {
          const double t = static_cast<double>(i - s.begin) / sample_rate;
          const double env = c.decay > 0.0 ? std::exp(-t / c.decay) : 1.0;
          out[i] += c.amplitude * env * std::sin(w * static_cast<double>(i - s.begin) + c.phase);
        }
        break;
      }
    }
  }
  return out;
}

ScenarioSpec load_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
  ScenarioSpec spec;
  std::vector<std::string> failures;
  if (auto d = doc.find("duration"); d != doc.end() && d->is_number()) {
    spec.duration = d->get<double>();
  } else {
    failures.push_back("scenario.duration missing or not a number");
  }
  const auto comps = doc.find("components");
  if (comps == doc.end() || !comps->is_array()) {
    failures.push_back("scenario.components must be an array");
  } else {
    for (std::size_t i = 0; i < comps->size(); ++i) {
      const auto& j = (*comps)[i];
      const std::string where = "components[" + std::to_string(i) + "]";
      if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        failures.push_back(where + ".kind missing");
        continue;
      }
      ScenarioComponent c;
      try {
        c.kind = parse_kind(j["kind"].get<std::string>());
      } catch (const ValidationError& e) {
        failures.push_back(where + ": " + e.what());
        continue;
      }
      auto num = [&](const char* key, double& dst) {
        if (auto it = j.find(key); it != j.end()) {
          if (it->is_number()) dst = it->get<double>();
          else failures.push_back(where + "." + key + " must be a number");
        }
      };
      num("frequency", c.frequency);
      num("amplitude", c.amplitude);
      num("phase", c.phase);
      num("lo", c.lo);
      num("hi", c.hi);
      num("decay", c.decay);
      num("start", c.start);
      num("length", c.length);
      if (auto it = j.find("harmonics"); it != j.end()) {
        if (it->is_number_integer()) c.harmonics = it->get<int>();
        else failures.push_back(where + ".harmonics must be an integer");
      }
      if (auto it = j.find("seed"); it != j.end()) {
        if (it->is_number_unsigned()) c.seed = it->get<std::uint64_t>();
        else failures.push_back(where + ".seed must be a non-negative integer");
      }
      spec.components.push_back(c);
    }
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));
  return spec;
}

nlohmann::json to_json(const ScenarioSpec& spec) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : spec.components) {
    nlohmann::json j = {{"kind", to_string(c.kind)}, {"amplitude", c.amplitude},
                        {"start", c.start}, {"length", c.length}};
    switch (c.kind) {
      case ComponentKind::tone:
        j["frequency"] = c.frequency;
        j["phase"] = c.phase;
        break;
      case ComponentKind::harmonic_stack:
        j["frequency"] = c.frequency;
        j["harmonics"] = c.harmonics;
        break;
      case ComponentKind::broadband:
        j["lo"] = c.lo;
        j["hi"] = c.hi;
        j["seed"] = c.seed;
        break;
      case ComponentKind::burst:
        j["frequency"] = c.frequency;
        j["decay"] = c.decay;
        j["phase"] = c.phase;
        break;
    }
    comps.push_back(std::move(j));
  }
  return {{"duration", spec.duration}, {"components", std::move(comps)}};
}

ScenarioSpec ego_noise_scenario(double duration, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.duration = duration;
  ScenarioComponent motor;
  motor.kind = ComponentKind::harmonic_stack;
  motor.frequency = 120.0;
  motor.amplitude = 0.08;
  motor.harmonics = 3;
  ScenarioComponent hiss;
  hiss.kind = ComponentKind::broadband;
  hiss.lo = 600.0;
  hiss.hi = 1800.0;
  hiss.amplitude = 0.05;
  hiss.seed = seed;
  spec.components = {motor, hiss};
  return spec;
}

}  // namespace vibronoise
