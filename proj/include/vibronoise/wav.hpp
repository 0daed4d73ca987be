#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace vibronoise {

enum class SampleEncoding { pcm16, float32 };

struct WavSpec {
  std::uint32_t sample_rate = 48000;
  std::uint16_t channels = 1;
  SampleEncoding encoding = SampleEncoding::float32;
};

struct WavData {
  WavSpec spec;
  std::vector<double> samples;  ///< interleaved, full scale = 1.0
};

/// Reads 16-bit PCM or 32-bit float WAV (plain or WAVE_FORMAT_EXTENSIBLE).
/// Throws IoError when the file is unreadable or truncated, ValidationError for
/// an unsupported encoding.
WavData read_wav(const std::filesystem::path& path);

/// Writes interleaved samples. 16-bit output is clamped to full scale.
void write_wav(const std::filesystem::path& path, const WavSpec& spec,
               std::span<const double> samples);

/// Returns the samples of a mono file at `expected_rate`; otherwise throws
/// ValidationError naming the offending field (channels or sample_rate).
std::vector<double> require_mono(WavData data, double expected_rate);

}  // namespace vibronoise
