#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vibronoise/config.hpp"
#include "vibronoise/errors.hpp"
#include "vibronoise/scenario.hpp"
#include "vibronoise/wav.hpp"
#include "vibronoise/workflows.hpp"

namespace vibronoise::cli {

namespace fs = std::filesystem;

namespace {

EngineConfig config_from(const std::string& path) {
  return path.empty() ? EngineConfig{} : load_config_file(path);
}

std::vector<double> read_input(const std::string& path, const EngineConfig& cfg) {
  return require_mono(read_wav(path), cfg.sample_rate);
}

NoiseFilter read_filter(const std::string& path, const EngineConfig& cfg) {
  return NoiseFilter::load(read_json_file(path), cfg.scheme);
}

fs::path sidecar(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perceived-intensity ego-noise suppression and AM re-synthesis for vibrotactile signals",
               "vibronoise"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, filter_path, report_path, csv_path, scenario_path,
      spectrum_csv, baseline, encoding = "float32";
  bool auto_freeze = false;
  double seconds = 60.0;
  double sample_rate = 0.0;

  auto* cal = app.add_subcommand("calibrate", "Adapt a noise filter to recorded ego-noise");
  cal->add_option("--config,-c", config_path, "Engine configuration (JSON)");
  cal->add_option("--in", in_path, "Mono ego-noise recording (WAV)")->required();
  cal->add_option("--filter-out", filter_path, "Where to write the filter document")->required();
  cal->add_flag("--auto-freeze", auto_freeze, "Stop adapting once the filter converges");
  cal->add_option("--report", report_path, "Per-frame CSV report");

  auto* proc = app.add_subcommand("process", "Suppress ego-noise and render the AM carrier");
  proc->add_option("--config,-c", config_path, "Engine configuration (JSON)");
  proc->add_option("--filter", filter_path, "Calibrated filter document")->required();
  proc->add_option("--in", in_path, "Mono input (WAV)")->required();
  proc->add_option("--out", out_path, "Output WAV (32-bit float)")->required();
  proc->add_option("--report", report_path, "Per-frame CSV report; a .json summary is written alongside");

  auto* syn = app.add_subcommand("synth", "Render a synthetic scenario to WAV");
  syn->add_option("--scenario", scenario_path, "Scenario description (JSON)")->required();
  syn->add_option("--out", out_path, "Output WAV")->required();
  syn->add_option("--sample-rate", sample_rate, "Sample rate in Hz (default: scenario or 48000)");
  syn->add_option("--encoding", encoding, "float32 or pcm16")
      ->check(CLI::IsMember({"float32", "pcm16"}));

  auto* ana = app.add_subcommand("analyze", "Dump per-frame band intensities and residuals");
  ana->add_option("--config,-c", config_path, "Engine configuration (JSON)");
  ana->add_option("--filter", filter_path, "Calibrated filter document")->required();
  ana->add_option("--in", in_path, "Mono input (WAV)")->required();
  ana->add_option("--csv", csv_path, "Wide per-frame CSV")->required();
  ana->add_option("--spectrum-csv", spectrum_csv, "Long-form frame_index,band_lo_hz,intensity CSV");
  ana->add_option("--baseline", baseline, "Comparison method")
      ->check(CLI::IsMember({"amplitude-subtraction"}));

  auto* ben = app.add_subcommand("bench", "Time the engine against the hop deadline");
  ben->add_option("--config,-c", config_path, "Engine configuration (JSON)");
  ben->add_option("--seconds", seconds, "Seconds of synthetic input")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "vibronoise: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*cal) {
      const auto cfg = config_from(config_path);
      const auto noise = read_input(in_path, cfg);
      const auto result = calibrate(cfg, noise, auto_freeze);
      write_json_file(filter_path, result.filter.save());
      if (!report_path.empty()) {
        write_frame_csv(report_path, result.frames, cfg.hop_seconds);
        write_json_file(sidecar(report_path, ".json"), to_json(result.report));
      }
      out << "calibrated " << result.report.frames << " frames; converged="
          << (result.report.converged ? "true" : "false");
      if (result.report.freeze_frame) out << " freeze_frame=" << *result.report.freeze_frame;
      out << "\n";
    } else if (*proc) {
      const auto cfg = config_from(config_path);
      const auto filter = read_filter(filter_path, cfg);
      const auto input = read_input(in_path, cfg);
      const auto result = process(cfg, filter, input);
      WavSpec spec;
      spec.sample_rate = static_cast<std::uint32_t>(cfg.sample_rate);
      write_wav(out_path, spec, result.output);
      if (!report_path.empty()) {
        write_frame_csv(report_path, result.frames, cfg.hop_seconds);
        write_json_file(sidecar(report_path, ".json"), to_json(result.report));
      }
      out << "processed " << result.report.frames << " frames, " << result.report.output_samples
          << " samples\n";
    } else if (*syn) {
      const auto doc = read_json_file(scenario_path);
      const auto spec = load_scenario(doc);
      double rate = sample_rate;
      if (rate <= 0.0) rate = doc.value("sample_rate", 48000.0);
      WavSpec wav;
      wav.sample_rate = static_cast<std::uint32_t>(rate);
      wav.encoding = encoding == "pcm16" ? SampleEncoding::pcm16 : SampleEncoding::float32;
      const auto samples = generate(spec, rate);
      write_wav(out_path, wav, samples);
      out << "wrote " << samples.size() << " samples\n";
    } else if (*ana) {
      const auto cfg = config_from(config_path);
      const auto filter = read_filter(filter_path, cfg);
      const auto input = read_input(in_path, cfg);
      const auto result = analyze(cfg, filter, input, !baseline.empty());
      write_analysis_csv(csv_path, result, cfg.scheme, cfg.hop_seconds);
      write_filter_csv(sidecar(csv_path, ".filter.csv"), result.filter_values, cfg.scheme);
      if (!spectrum_csv.empty()) write_spectrum_csv(spectrum_csv, result, cfg.scheme);
      out << "analyzed " << result.frames.size() << " frames\n";
    } else if (*ben) {
      const auto cfg = config_from(config_path);
      const auto perf = bench(cfg, seconds);
      out << to_json(perf).dump(2) << "\n";
    }
  } catch (const IoError& e) {
    err << "vibronoise: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "vibronoise: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "vibronoise: invalid value: " << e.what() << "\n";
    return kExitValidation;
  } catch (const StateError& e) {
    err << "vibronoise: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace vibronoise::cli
