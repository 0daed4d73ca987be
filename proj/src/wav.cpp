#include "vibronoise/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  std::array<std::uint8_t, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  out.insert(out.end(), bytes.begin(), bytes.end());
}

void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError(name + ": not a RIFF/WAVE file");
  }

  WavData data;
  bool have_fmt = false;
  std::uint16_t format = 0, bits = 0, block_align = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const auto size = read_le<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw IoError(name + ": truncated chunk");

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw IoError(name + ": fmt chunk too short");
      const std::uint8_t* f = bytes.data() + body;
      format = read_le<std::uint16_t>(f);
      data.spec.channels = read_le<std::uint16_t>(f + 2);
      data.spec.sample_rate = read_le<std::uint32_t>(f + 4);
      block_align = read_le<std::uint16_t>(f + 12);
      bits = read_le<std::uint16_t>(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw IoError(name + ": extensible fmt chunk too short");
        format = read_le<std::uint16_t>(f + 24);  // first two bytes of the subformat GUID
      }
      if (format == kFormatPcm && bits == 16) {
        data.spec.encoding = SampleEncoding::pcm16;
      } else if (format == kFormatFloat && bits == 32) {
        data.spec.encoding = SampleEncoding::float32;
      } else {
        throw ValidationError(name + ": encoding: unsupported format " + std::to_string(format) +
                              " with " + std::to_string(bits) +
                              " bits (need 16-bit PCM or 32-bit float)");
      }
      if (data.spec.channels == 0) throw ValidationError(name + ": channels: zero channels");
      if (block_align != data.spec.channels * (bits / 8))
        throw IoError(name + ": inconsistent block alignment");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw IoError(name + ": data chunk before fmt chunk");
      const std::size_t width = bits / 8;
      const std::size_t count = size / width;
      data.samples.resize(count);
      const std::uint8_t* p = bytes.data() + body;
      if (data.spec.encoding == SampleEncoding::pcm16) {
        for (std::size_t i = 0; i < count; ++i)
          data.samples[i] = read_le<std::int16_t>(p + 2 * i) / 32768.0;
      } else {
        for (std::size_t i = 0; i < count; ++i) data.samples[i] = read_le<float>(p + 4 * i);
      }
      return data;
    }
    pos = body + size + (size & 1u);
  }
  throw IoError(name + (have_fmt ? ": missing data chunk" : ": missing fmt chunk"));
}

void write_wav(const std::filesystem::path& path, const WavSpec& spec,
               std::span<const double> samples) {
  if (spec.channels == 0) throw ValidationError("channels: must be >= 1");
  if (spec.sample_rate == 0) throw ValidationError("sample_rate: must be > 0");
  const bool pcm = spec.encoding == SampleEncoding::pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t align = static_cast<std::uint16_t>(spec.channels * bits / 8);
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(samples.size()) * (bits / 8);
  if (data_bytes > 0xFFFFFFFFull - 64) throw ValidationError("samples: too many for a WAV file");

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(36 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_le<std::uint32_t>(out, 16);
  put_le<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  put_le<std::uint16_t>(out, spec.channels);
  put_le<std::uint32_t>(out, spec.sample_rate);
  put_le<std::uint32_t>(out, spec.sample_rate * align);
  put_le<std::uint16_t>(out, align);
  put_le<std::uint16_t>(out, bits);
  put_tag(out, "data");
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(data_bytes));
  for (double s : samples) {
    if (pcm) {
      const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
      put_le<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
    } else {
      put_le<float>(out, static_cast<float>(s));
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

std::vector<double> require_mono(WavData data, double expected_rate) {
  std::vector<std::string> failures;
  if (data.spec.channels != 1)
    failures.push_back("channels: expected 1, file has " + std::to_string(data.spec.channels));
  if (static_cast<double>(data.spec.sample_rate) != expected_rate)
    failures.push_back("sample_rate: file is " + std::to_string(data.spec.sample_rate) +
                       " Hz, engine expects " + std::to_string(static_cast<long>(expected_rate)) +
                       " Hz");
  if (!failures.empty()) throw ValidationError(std::move(failures));
  return std::move(data.samples);
}

}  // namespace vibronoise
