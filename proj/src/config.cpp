#include "vibronoise/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {

std::size_t whole_samples(double seconds, double rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

bool is_whole(double seconds, double rate) {
  const double n = seconds * rate;
  return n >= 1.0 && std::abs(n - std::round(n)) < 1e-6;
}

const nlohmann::json& section(const nlohmann::json& doc, const char* name) {
  static const nlohmann::json null_section;
  auto it = doc.find(name);
  if (it == doc.end()) return null_section;
  if (!it->is_object()) throw ValidationError(std::string(name) + ": section must be an object");
  return *it;
}

class FieldReader {
 public:
  FieldReader(const nlohmann::json& s, std::string prefix, std::vector<std::string>& failures)
      : s_(s), prefix_(std::move(prefix)), failures_(failures) {}

  void number(const char* key, double& dst) {
    if (auto it = find(key)) {
      if ((*it)->is_number()) dst = (*it)->get<double>();
      else fail(key, "must be a number");
    }
  }
  void count(const char* key, std::size_t& dst) {
    if (auto it = find(key)) {
      if ((*it)->is_number_unsigned()) dst = (*it)->get<std::size_t>();
      else fail(key, "must be a non-negative integer");
    }
  }
  void flag(const char* key, bool& dst) {
    if (auto it = find(key)) {
      if ((*it)->is_boolean()) dst = (*it)->get<bool>();
      else fail(key, "must be true or false");
    }
  }
  const nlohmann::json* string(const char* key) {
    if (auto it = find(key)) {
      if ((*it)->is_string()) return *it;
      fail(key, "must be a string");
    }
    return nullptr;
  }

 private:
  std::optional<const nlohmann::json*> find(const char* key) {
    if (s_.is_null()) return std::nullopt;
    auto it = s_.find(key);
    if (it == s_.end()) return std::nullopt;
    return &*it;
  }
  void fail(const char* key, const char* what) { failures_.push_back(prefix_ + key + " " + what); }

  const nlohmann::json& s_;
  std::string prefix_;
  std::vector<std::string>& failures_;
};

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::calibrate ? "calibrate" : "run"; }

std::size_t EngineConfig::hop_samples() const { return whole_samples(hop_seconds, sample_rate); }
std::size_t EngineConfig::window_samples() const {
  return whole_samples(window_seconds, sample_rate);
}

void EngineConfig::validate() const {
  std::vector<std::string> failures;
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    failures.push_back("pipeline.sample_rate must be > 0");
  if (!is_whole(hop_seconds, sample_rate))
    failures.push_back("pipeline.hop_ms must be a whole number of samples");
  if (!is_whole(window_seconds, sample_rate))
    failures.push_back("pipeline.window_ms must be a whole number of samples");
  if (failures.empty()) {
    if (window_samples() % hop_samples() != 0)
      failures.push_back("pipeline: hop must divide the analysis window");
    if (window_samples() < kMinWindowSamples)
      failures.push_back("pipeline.window_ms must cover at least 16 samples");
  }
  if (convergence_window < 1 || convergence_window > NoiseFilter::kDeltaHistory)
    failures.push_back("pipeline.convergence_window must be in [1, 4096]");
  if (!(convergence_epsilon > 0.0)) failures.push_back("pipeline.convergence_epsilon must be > 0");
  if (!(filter_floor >= 0.0) || !std::isfinite(filter_floor))
    failures.push_back("filter.floor must be >= 0");
  if (!(carrier_hz >= kModelMinHz && carrier_hz < kModelMaxHz))
    failures.push_back("synth.carrier_hz must lie in [100, 20000)");
  if (!(sample_rate > 2.0 * carrier_hz)) failures.push_back("sample_rate must exceed 2 * carrier");
  try {
    emd.validate();
  } catch (const ValidationError& e) {
    failures.insert(failures.end(), e.failures().begin(), e.failures().end());
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));
}

EngineConfig load_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  EngineConfig cfg;
  std::vector<std::string> failures;

  const auto& pipe = section(doc, "pipeline");
  FieldReader p(pipe, "pipeline.", failures);
  p.number("sample_rate", cfg.sample_rate);
  double hop_ms = cfg.hop_seconds * 1e3, window_ms = cfg.window_seconds * 1e3;
  p.number("hop_ms", hop_ms);
  p.number("window_ms", window_ms);
  cfg.hop_seconds = hop_ms * 1e-3;
  cfg.window_seconds = window_ms * 1e-3;
  if (const auto* mode = p.string("mode")) {
    const auto m = mode->get<std::string>();
    if (m == "calibrate") cfg.mode = Mode::calibrate;
    else if (m == "run") cfg.mode = Mode::run;
    else failures.push_back("pipeline.mode must be \"calibrate\" or \"run\"");
  }
  p.count("convergence_window", cfg.convergence_window);
  p.number("convergence_epsilon", cfg.convergence_epsilon);
  p.flag("auto_freeze", cfg.auto_freeze);

  const auto& filt = section(doc, "filter");
  FieldReader f(filt, "filter.", failures);
  f.number("floor", cfg.filter_floor);
  if (const auto* seed = f.string("seed")) {
    try {
      cfg.seed = parse_seed_mode(seed->get<std::string>());
    } catch (const ValidationError& e) {
      failures.push_back(e.what());
    }
  }

  const auto& synth = section(doc, "synth");
  FieldReader s(synth, "synth.", failures);
  s.number("carrier_hz", cfg.carrier_hz);

  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      failures.insert(failures.end(), e.failures().begin(), e.failures().end());
    }
  };
  collect([&] { cfg.emd = load_sift_params(section(doc, "emd")); });
  collect([&] {
    if (!filt.is_null() && filt.contains("scheme")) cfg.scheme = load_band_scheme(filt["scheme"]);
  });
  collect([&] {
    const auto& perc = section(doc, "perception");
    if (!perc.is_null()) cfg.model = load_model(perc);
  });

  if (!failures.empty()) throw ValidationError(std::move(failures));
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const EngineConfig& cfg) {
  return {
      {"pipeline",
       {{"sample_rate", cfg.sample_rate},
        {"hop_ms", cfg.hop_seconds * 1e3},
        {"window_ms", cfg.window_seconds * 1e3},
        {"mode", to_string(cfg.mode)},
        {"convergence_window", cfg.convergence_window},
        {"convergence_epsilon", cfg.convergence_epsilon},
        {"auto_freeze", cfg.auto_freeze}}},
      {"emd", to_json(cfg.emd)},
      {"perception", to_json(cfg.model)},
      {"filter",
       {{"floor", cfg.filter_floor}, {"seed", to_string(cfg.seed)}, {"scheme", to_json(cfg.scheme)}}},
      {"synth", {{"carrier_hz", cfg.carrier_hz}}},
  };
}

EngineConfig load_config_file(const std::filesystem::path& path) {
  return load_config(read_json_file(path));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw ValidationError(path.string() + ": malformed JSON");
  return doc;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace vibronoise
