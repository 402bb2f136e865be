#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "birddet/audio_io.hpp"
#include "birddet/rng.hpp"
#include "birddet/util.hpp"
#include "support/temp_dir.hpp"

using namespace birddet;
using testsupport::TempDir;

namespace {

AudioClip random_clip(std::size_t n, int fs, std::uint64_t seed) {
  Rng rng(seed);
  AudioClip clip;
  clip.sample_rate = fs;
  clip.samples.resize(n);
  for (auto& x : clip.samples) x = rng.uniform(-0.95, 0.95);
  return clip;
}

// Minimal hand-rolled stereo 16-bit WAV.
void write_stereo_pcm16(const std::filesystem::path& path,
                        const std::vector<std::int16_t>& left,
                        const std::vector<std::int16_t>& right, int fs) {
  std::string out;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  auto u16 = [&](std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  std::uint32_t data_size = static_cast<std::uint32_t>(left.size()) * 4;
  out.append("RIFF");
  u32(36 + data_size);
  out.append("WAVEfmt ");
  u32(16);
  u16(1);
  u16(2);
  u32(static_cast<std::uint32_t>(fs));
  u32(static_cast<std::uint32_t>(fs) * 4);
  u16(4);
  u16(16);
  out.append("data");
  u32(data_size);
  for (std::size_t i = 0; i < left.size(); ++i) {
    u16(static_cast<std::uint16_t>(left[i]));
    u16(static_cast<std::uint16_t>(right[i]));
  }
  atomic_write_file(path, out);
}

}  // namespace

TEST_CASE("synth_tone basics") {
  AudioClip clip = synth_tone(1000.0, 1.0, 8000, 1.0);
  CHECK(clip.samples.size() == 8000);
  CHECK(clip.sample_rate == 8000);
  double rms = 0.0;
  for (double x : clip.samples) rms += x * x;
  rms = std::sqrt(rms / clip.samples.size());
  CHECK(rms == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

  AudioClip silent = synth_tone(1000.0, 0.5, 8000, 0.0);
  for (double x : silent.samples) CHECK(x == 0.0);

  CHECK_THROWS_WITH_AS(synth_tone(5000.0, 1.0, 8000, 1.0),
                       doctest::Contains("Nyquist"), std::invalid_argument);
  CHECK_THROWS(synth_tone(4000.0, 1.0, 8000, 1.0));  // exactly Nyquist
  CHECK_THROWS(synth_tone(-10.0, 1.0, 8000, 1.0));
}

TEST_CASE("tone file round-trip keeps count and rate") {
  TempDir dir;
  AudioClip tone = synth_tone(440.0, 1.0, 44100, 0.5);
  write_wav(dir / "tone.wav", tone);
  AudioClip back = load_audio(dir / "tone.wav");
  CHECK(back.samples.size() == 44100);
  CHECK(back.sample_rate == 44100);
  CHECK(back.duration_seconds() == doctest::Approx(1.0));
}

TEST_CASE("integer encodings round-trip within one LSB") {
  TempDir dir;
  AudioClip clip = random_clip(2000, 22050, 3);

  struct Case { WavEncoding enc; double lsb; const char* name; };
  for (auto [enc, lsb, name] : {Case{WavEncoding::pcm8, 1.0 / 128, "pcm8"},
                                Case{WavEncoding::pcm16, 1.0 / 32768, "pcm16"},
                                Case{WavEncoding::pcm24, 1.0 / 8388608, "pcm24"}}) {
    CAPTURE(name);
    write_wav(dir / "clip.wav", clip, enc);
    AudioClip back = load_audio(dir / "clip.wav");
    REQUIRE(back.samples.size() == clip.samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < back.samples.size(); ++i)
      worst = std::max(worst, std::abs(back.samples[i] - clip.samples[i]));
    CHECK(worst <= lsb);
  }
}

TEST_CASE("float32 encoding is exact at float precision") {
  TempDir dir;
  AudioClip clip = random_clip(500, 16000, 4);
  for (auto& x : clip.samples) x = static_cast<double>(static_cast<float>(x));
  write_wav(dir / "f32.wav", clip, WavEncoding::float32);
  AudioClip back = load_audio(dir / "f32.wav");
  REQUIRE(back.samples.size() == clip.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i)
    CHECK(back.samples[i] == clip.samples[i]);
}

TEST_CASE("stereo mixdown is the exact channel mean") {
  TempDir dir;
  Rng rng(8);
  std::vector<std::int16_t> left(300), right(300);
  for (std::size_t i = 0; i < left.size(); ++i) {
    left[i] = static_cast<std::int16_t>(rng.uniform_index(65536)) ;
    right[i] = static_cast<std::int16_t>(rng.uniform_index(65536));
  }
  write_stereo_pcm16(dir / "st.wav", left, right, 8000);
  AudioClip mono = load_audio(dir / "st.wav");
  REQUIRE(mono.samples.size() == 300);
  for (std::size_t i = 0; i < 300; ++i) {
    double expected = (left[i] / 32768.0 + right[i] / 32768.0) / 2.0;
    CHECK(mono.samples[i] == expected);
  }

  // opposite channels cancel exactly
  std::vector<std::int16_t> neg(300);
  for (std::size_t i = 0; i < 300; ++i) neg[i] = static_cast<std::int16_t>(-left[i]);
  write_stereo_pcm16(dir / "cancel.wav", left, neg, 8000);
  AudioClip zero = load_audio(dir / "cancel.wav");
  for (double x : zero.samples) CHECK(x == 0.0);
}

TEST_CASE("malformed inputs are rejected with clear errors") {
  TempDir dir;

  SUBCASE("zero-length audio") {
    write_stereo_pcm16(dir / "empty.wav", {}, {}, 8000);
    CHECK_THROWS_WITH_AS(load_audio(dir / "empty.wav"),
                         doctest::Contains("zero-length audio"), std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_audio(dir / "nope.wav"));
  }
  SUBCASE("not a RIFF file") {
    atomic_write_file(dir / "bad.wav", "this is not audio at all, not even close");
    CHECK_THROWS_WITH_AS(load_audio(dir / "bad.wav"), doctest::Contains("RIFF"),
                         std::runtime_error);
  }
  SUBCASE("unsupported codec") {
    // format tag 6 = a-law
    AudioClip clip = synth_tone(500.0, 0.1, 8000, 0.5);
    write_wav(dir / "alaw.wav", clip, WavEncoding::pcm16);
    std::string bytes = read_file(dir / "alaw.wav");
    bytes[20] = 6;
    atomic_write_file(dir / "alaw.wav", bytes);
    CHECK_THROWS_WITH_AS(load_audio(dir / "alaw.wav"),
                         doctest::Contains("unsupported encoding"), std::runtime_error);
  }
  SUBCASE("truncated data chunk") {
    AudioClip clip = synth_tone(500.0, 0.1, 8000, 0.5);
    write_wav(dir / "trunc.wav", clip, WavEncoding::pcm16);
    std::string bytes = read_file(dir / "trunc.wav");
    bytes.resize(bytes.size() / 2);
    atomic_write_file(dir / "trunc.wav", bytes);
    CHECK_THROWS(load_audio(dir / "trunc.wav"));
  }
}
