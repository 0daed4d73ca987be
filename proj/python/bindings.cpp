#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "vibronoise/config.hpp"
#include "vibronoise/emd.hpp"
#include "vibronoise/errors.hpp"
#include "vibronoise/ism_synth.hpp"
#include "vibronoise/noise_filter.hpp"
#include "vibronoise/perception.hpp"
#include "vibronoise/pipeline.hpp"
#include "vibronoise/scenario.hpp"
#include "vibronoise/spectrum.hpp"
#include "vibronoise/wav.hpp"
#include "vibronoise/workflows.hpp"

namespace py = pybind11;
using namespace vibronoise;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

// JSON documents cross the boundary as text so Python sees plain dicts via json.loads.
nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

py::dict stats_dict(const FrameStats& s) {
  py::dict d;
  d["frame_index"] = s.frame_index;
  d["input_total_intensity"] = s.input_total_intensity;
  d["residual_total_intensity"] = s.residual_total_intensity;
  d["filter_max_delta"] = s.filter_max_delta;
  d["target_amplitude"] = s.target_amplitude;
  d["processing_time"] = s.processing_time;
  d["deadline_missed"] = s.deadline_missed;
  d["saturation_count"] = s.saturation_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perceptual ego-noise suppression for vibrotactile signals";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<PerceptionModel>(m, "PerceptionModel")
      .def(py::init([](const std::vector<std::tuple<double, double, double>>& knots, double gain) {
             std::vector<PerceptionKnot> k;
             for (const auto& [hz, t, e] : knots) k.push_back({hz, t, e});
             return PerceptionModel(std::move(k), gain);
           }),
           py::arg("knots"), py::arg("reference_gain") = 1.0)
      .def_static("default", &PerceptionModel::default_model)
      .def_static("from_json", [](const std::string& s) { return load_model(parse(s)); })
      .def("to_json", [](const PerceptionModel& p) { return to_json(p).dump(); })
      .def("threshold_at", &PerceptionModel::threshold_at, py::arg("hz"))
      .def("exponent_at", &PerceptionModel::exponent_at, py::arg("hz"))
      .def("perceived_intensity", &PerceptionModel::perceived_intensity, py::arg("amplitude"),
           py::arg("hz"))
      .def("amplitude_for_intensity", &PerceptionModel::amplitude_for_intensity,
           py::arg("intensity"), py::arg("hz"));

  py::enum_<BoundaryMode>(m, "BoundaryMode")
      .value("mirror", BoundaryMode::mirror)
      .value("endpoint", BoundaryMode::endpoint);

  py::class_<SiftParams>(m, "SiftParams")
      .def(py::init<>())
      .def_readwrite("max_imfs", &SiftParams::max_imfs)
      .def_readwrite("max_sift_iterations", &SiftParams::max_sift_iterations)
      .def_readwrite("sd_threshold", &SiftParams::sd_threshold)
      .def_readwrite("boundary", &SiftParams::boundary);

  m.def(
      "decompose",
      [](const Array& window, const SiftParams& params) {
        const auto set = decompose(view(window), params);
        py::list imfs;
        for (const auto& imf : set.imfs) imfs.append(to_array(imf));
        return py::make_tuple(imfs, to_array(set.residual));
      },
      py::arg("window"), py::arg("params") = SiftParams{},
      "Returns (imfs, residual); imfs are ordered highest frequency first.");
  m.def("dominant_frequency", [](const Array& imf, double rate) { return dominant_frequency(view(imf), rate); },
        py::arg("imf"), py::arg("sample_rate"));
  m.def("imf_amplitude", [](const Array& imf) { return imf_amplitude(view(imf)); }, py::arg("imf"));

  py::class_<BandScheme>(m, "BandScheme")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("f_lo"), py::arg("f_hi"), py::arg("width"))
      .def_property_readonly("count", &BandScheme::count)
      .def_property_readonly("f_lo", &BandScheme::f_lo)
      .def_property_readonly("f_hi", &BandScheme::f_hi)
      .def_property_readonly("width", &BandScheme::width)
      .def("band_lo", &BandScheme::band_lo)
      .def("band_index", &BandScheme::band_index, py::arg("hz"));

  m.def(
      "frame_spectrum",
      [](const Array& window, double rate, const PerceptionModel& model, const BandScheme& scheme,
         const SiftParams& params) {
        return to_array(frame_spectrum(view(window), rate, model, scheme, params).values);
      },
      py::arg("window"), py::arg("sample_rate") = 48000.0,
      py::arg("model") = PerceptionModel::default_model(), py::arg("scheme") = BandScheme{},
      py::arg("params") = SiftParams{});

  py::enum_<SeedMode>(m, "SeedMode")
      .value("floor", SeedMode::floor)
      .value("first_observation", SeedMode::first_observation);

  py::class_<NoiseFilter>(m, "NoiseFilter")
      .def(py::init<BandScheme, double, SeedMode>(), py::arg("scheme") = BandScheme{},
           py::arg("floor") = NoiseFilter::kDefaultFloor, py::arg("seed") = SeedMode::floor)
      .def_property_readonly("values", [](const NoiseFilter& f) {
        return to_array({f.values().begin(), f.values().end()});
      })
      .def_property_readonly("update_count", &NoiseFilter::update_count)
      .def_property_readonly("frozen", &NoiseFilter::frozen)
      .def(
          "update",
          [](NoiseFilter& f, const Array& spectrum) {
            IntensitySpectrum s;
            const auto v = view(spectrum);
            s.values.assign(v.begin(), v.end());
            return f.update(s);
          },
          py::arg("spectrum"))
      .def("is_converged", &NoiseFilter::is_converged, py::arg("window") = 40,
           py::arg("epsilon") = 0.01)
      .def("freeze", &NoiseFilter::freeze)
      .def("subtract",
           [](const NoiseFilter& f, const Array& spectrum) {
             const auto v = view(spectrum);
             IntensitySpectrum s;
             s.values.assign(v.begin(), v.end());
             if (s.values.size() != f.values().size())
               throw DomainError("spectrum band count does not match the filter");
             return to_array(subtract(s, f).values);
           })
      .def("save", [](const NoiseFilter& f) { return f.save().dump(); })
      .def_static(
          "load", [](const std::string& s, const BandScheme& scheme) { return NoiseFilter::load(parse(s), scheme); },
          py::arg("document"), py::arg("scheme") = BandScheme{});

  m.def("damped_update", &damped_update, py::arg("current"), py::arg("input"));

  py::class_<SynthState>(m, "SynthState")
      .def(py::init<>())
      .def_readwrite("carrier", &SynthState::carrier)
      .def_readwrite("sample_rate", &SynthState::sample_rate)
      .def_readwrite("phase", &SynthState::phase)
      .def_readwrite("prev_amplitude", &SynthState::prev_amplitude);
  m.def("target_amplitude", &target_amplitude, py::arg("model"), py::arg("total_intensity"),
        py::arg("carrier_hz") = 200.0);
  m.def(
      "render_frame",
      [](SynthState& st, double target, std::size_t n) {
        auto f = render_frame(st, target, n);
        return py::make_tuple(to_array(f.samples), f.saturated);
      },
      py::arg("state"), py::arg("target"), py::arg("n_samples") = 120,
      "Renders one hop; returns (samples, saturated) and advances `state`.");

  py::class_<EngineConfig>(m, "EngineConfig")
      .def(py::init<>())
      .def_static("from_json", [](const std::string& s) { return load_config(parse(s)); })
      .def_static("from_file", &load_config_file)
      .def("to_json", [](const EngineConfig& c) { return to_json(c).dump(); })
      .def_readwrite("sample_rate", &EngineConfig::sample_rate)
      .def_readwrite("auto_freeze", &EngineConfig::auto_freeze)
      .def_readwrite("seed", &EngineConfig::seed)
      .def_readwrite("model", &EngineConfig::model)
      .def_readwrite("emd", &EngineConfig::emd)
      .def_property_readonly("hop_samples", &EngineConfig::hop_samples)
      .def_property_readonly("window_samples", &EngineConfig::window_samples);

  py::class_<Engine>(m, "Engine")
      .def(py::init<EngineConfig>(), py::arg("config") = EngineConfig{})
      .def(py::init<EngineConfig, NoiseFilter>(), py::arg("config"), py::arg("filter"))
      .def(
          "process_hop",
          [](Engine& e, const Array& hop) {
            auto r = e.process_hop(view(hop));
            return py::make_tuple(to_array(r.output), stats_dict(r.stats));
          },
          py::arg("hop"))
      .def_property_readonly("filter", &Engine::filter)
      .def_property_readonly("frames_processed", &Engine::frames_processed)
      .def_property_readonly("freeze_frame", &Engine::freeze_frame)
      .def("converged", &Engine::converged)
      .def("freeze_filter", &Engine::freeze_filter);

  m.def(
      "calibrate",
      [](const EngineConfig& c, const Array& noise, bool auto_freeze) {
        auto r = calibrate(c, view(noise), auto_freeze);
        return py::make_tuple(r.filter, to_json(r.report).dump());
      },
      py::arg("config"), py::arg("noise"), py::arg("auto_freeze") = true,
      "Returns (frozen filter, run report as JSON text).");
  m.def(
      "process",
      [](const EngineConfig& c, const NoiseFilter& f, const Array& input) {
        auto r = process(c, f, view(input));
        return py::make_tuple(to_array(r.output), to_json(r.report).dump());
      },
      py::arg("config"), py::arg("filter"), py::arg("input"),
      "Returns (output samples, run report as JSON text).");

  m.def("generate", [](const std::string& scenario, double rate) { return to_array(generate(load_scenario(parse(scenario)), rate)); },
        py::arg("scenario"), py::arg("sample_rate") = 48000.0,
        "Synthesises a scenario given as JSON text.");
  m.def("ego_noise", [](double seconds, std::uint64_t seed, double rate) {
        return to_array(generate(ego_noise_scenario(seconds, seed), rate));
      },
      py::arg("seconds"), py::arg("seed") = 7, py::arg("sample_rate") = 48000.0);

  m.def(
      "read_wav",
      [](const std::filesystem::path& p) {
        auto d = read_wav(p);
        return py::make_tuple(to_array(d.samples), d.spec.sample_rate, d.spec.channels);
      },
      py::arg("path"), "Returns (interleaved samples, sample_rate, channels).");
  m.def(
      "write_wav",
      [](const std::filesystem::path& p, const Array& samples, std::uint32_t rate,
         const std::string& encoding) {
        WavSpec spec;
        spec.sample_rate = rate;
        if (encoding == "pcm16") spec.encoding = SampleEncoding::pcm16;
        else if (encoding != "float32") throw ValidationError("encoding must be float32 or pcm16");
        write_wav(p, spec, view(samples));
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = 48000,
      py::arg("encoding") = "float32");
}
