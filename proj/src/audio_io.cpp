#include "birddet/audio_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "birddet/util.hpp"

namespace birddet {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
  throw std::runtime_error("load_audio: " + path.string() + ": " + why);
}

struct ByteReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t off = 0;

  bool remaining(std::size_t n) const { return off + n <= size; }
  std::uint32_t u32() {
    std::uint32_t v = static_cast<std::uint32_t>(data[off]) |
                      static_cast<std::uint32_t>(data[off + 1]) << 8 |
                      static_cast<std::uint32_t>(data[off + 2]) << 16 |
                      static_cast<std::uint32_t>(data[off + 3]) << 24;
    off += 4;
    return v;
  }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(data[off] | data[off + 1] << 8);
    off += 2;
    return v;
  }
};

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    std::uint32_t u = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                      static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
    float f;
    std::memcpy(&f, &u, sizeof(f));
    return static_cast<double>(f);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | p[1] << 8);
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      return v / 8388608.0;
    }
    default:
      throw std::logic_error("decode_sample: unexpected bit depth");
  }
}

void append_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

std::int32_t quantize(double x, double scale, std::int32_t lo, std::int32_t hi) {
  double v = std::round(x * scale);
  if (v < lo) return lo;
  if (v > hi) return hi;
  return static_cast<std::int32_t>(v);
}

}  // namespace

AudioClip load_audio(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("load_audio: ") + e.what());
  }
  ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};

  if (!r.remaining(12)) fail(path, "file too short for a RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0) fail(path, "not a RIFF file");
  r.off = 4;
  r.u32();  // declared RIFF size; trust actual chunk sizes instead
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) fail(path, "not a WAVE file");
  r.off = 12;

  FmtChunk fmt;
  bool have_fmt = false;
  const unsigned char* data_ptr = nullptr;
  std::size_t data_size = 0;

  while (r.remaining(8)) {
    char id[4];
    std::memcpy(id, bytes.data() + r.off, 4);
    r.off += 4;
    std::uint32_t chunk_size = r.u32();
    if (!r.remaining(chunk_size)) fail(path, "truncated chunk");
    std::size_t body = r.off;

    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) fail(path, "fmt chunk too small");
      fmt.format = r.u16();
      fmt.channels = r.u16();
      fmt.sample_rate = r.u32();
      r.u32();  // byte rate
      fmt.block_align = r.u16();
      fmt.bits = r.u16();
      if (fmt.format == kFormatExtensible) {
        if (chunk_size < 40) fail(path, "extensible fmt chunk too small");
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        fmt.format = r.u16();  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_ptr = r.data + body;
      data_size = chunk_size;
    }
    r.off = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) fail(path, "missing fmt chunk");
  if (data_ptr == nullptr) fail(path, "missing data chunk");
  if (fmt.format != kFormatPcm && fmt.format != kFormatFloat)
    fail(path, "unsupported encoding (format tag " + std::to_string(fmt.format) + ")");
  if (fmt.channels < 1 || fmt.channels > 2)
    fail(path, "unsupported channel count " + std::to_string(fmt.channels));
  if (fmt.sample_rate == 0) fail(path, "zero sample rate");
  if (fmt.format == kFormatPcm && fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24)
    fail(path, "unsupported PCM bit depth " + std::to_string(fmt.bits));
  if (fmt.format == kFormatFloat && fmt.bits != 32)
    fail(path, "unsupported float bit depth " + std::to_string(fmt.bits));
  std::size_t bytes_per_sample = fmt.bits / 8;
  if (fmt.block_align != bytes_per_sample * fmt.channels)
    fail(path, "fmt block align inconsistent with channels and bit depth");
  if (data_size % fmt.block_align != 0)
    fail(path, "data size is not a whole number of sample frames");

  std::size_t n_frames = data_size / fmt.block_align;
  if (n_frames == 0) fail(path, "zero-length audio");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.source_id = path.filename().string();
  clip.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const unsigned char* p = data_ptr + i * fmt.block_align;
    double acc = 0.0;
    for (std::uint16_t c = 0; c < fmt.channels; ++c) {
      acc += decode_sample(p + c * bytes_per_sample, fmt.format, fmt.bits);
    }
    clip.samples[i] = acc / fmt.channels;
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding) {
  if (clip.samples.empty()) throw std::invalid_argument("write_wav: empty clip");
  if (clip.sample_rate <= 0) throw std::invalid_argument("write_wav: invalid sample rate");

  std::uint16_t bits = 0, format = kFormatPcm;
  switch (encoding) {
    case WavEncoding::pcm8: bits = 8; break;
    case WavEncoding::pcm16: bits = 16; break;
    case WavEncoding::pcm24: bits = 24; break;
    case WavEncoding::float32: bits = 32; format = kFormatFloat; break;
  }
  std::uint16_t block_align = bits / 8;
  std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * block_align);

  std::string out;
  out.reserve(data_size + 64);
  out.append("RIFF");
  bool is_float = format == kFormatFloat;
  std::uint32_t fmt_size = is_float ? 18 : 16;
  std::uint32_t riff_size = 4 + (8 + fmt_size) + (is_float ? 8 + 4 : 0) + 8 + data_size;
  append_u32(out, riff_size);
  out.append("WAVE");

  out.append("fmt ");
  append_u32(out, fmt_size);
  append_u16(out, format);
  append_u16(out, 1);  // mono
  append_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  append_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * block_align);
  append_u16(out, block_align);
  append_u16(out, bits);
  if (is_float) {
    append_u16(out, 0);  // cbSize
    out.append("fact");
    append_u32(out, 4);
    append_u32(out, static_cast<std::uint32_t>(clip.samples.size()));
  }

  out.append("data");
  append_u32(out, data_size);
  for (double x : clip.samples) {
    switch (encoding) {
      case WavEncoding::pcm8: {
        std::int32_t v = quantize(x, 128.0, -128, 127);
        out.push_back(static_cast<char>(v + 128));
        break;
      }
      case WavEncoding::pcm16: {
        std::int32_t v = quantize(x, 32768.0, -32768, 32767);
        out.push_back(static_cast<char>(v & 0xFF));
        out.push_back(static_cast<char>((v >> 8) & 0xFF));
        break;
      }
      case WavEncoding::pcm24: {
        std::int32_t v = quantize(x, 8388608.0, -8388608, 8388607);
        out.push_back(static_cast<char>(v & 0xFF));
        out.push_back(static_cast<char>((v >> 8) & 0xFF));
        out.push_back(static_cast<char>((v >> 16) & 0xFF));
        break;
      }
      case WavEncoding::float32: {
        float f = static_cast<float>(x);
        std::uint32_t u;
        std::memcpy(&u, &f, sizeof(u));
        append_u32(out, u);
        break;
      }
    }
  }
  atomic_write_file(path, out);
}

AudioClip synth_tone(double freq_hz, double duration_s, int sample_rate, double amplitude) {
  if (sample_rate <= 0) throw std::invalid_argument("synth_tone: sample rate must be positive");
  if (!(freq_hz > 0.0)) throw std::invalid_argument("synth_tone: frequency must be positive");
  if (freq_hz >= sample_rate / 2.0)
    throw std::invalid_argument("synth_tone: frequency at or above Nyquist");
  auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (n == 0) throw std::invalid_argument("synth_tone: duration too short");

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = "tone_" + format_double(freq_hz) + "hz";
  clip.samples.resize(n);
  double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = amplitude * std::sin(w * static_cast<double>(i));
  }
  return clip;
}

}  // namespace birddet
