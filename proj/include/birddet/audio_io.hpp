#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace birddet {

// Mono sample buffer. Immutable by convention after construction; safe to
// share across threads.
struct AudioClip {
  std::vector<double> samples;  // nominal range [-1, 1]
  int sample_rate = 0;          // Hz
  std::string source_id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavEncoding { pcm8, pcm16, pcm24, float32 };

// Decode a PCM WAV (8/16/24-bit int or 32-bit float, 1 or 2 channels).
// Stereo is mixed down by channel averaging; integer samples are scaled to
// [-1, 1]; the native sample rate is preserved.
AudioClip load_audio(const std::filesystem::path& path);

// Mono writer. Integer encodings quantize by rounding, so a round-trip is
// exact to within one least significant bit.
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding = WavEncoding::pcm16);

// Deterministic sinusoid fixture: samples[i] = amplitude * sin(2*pi*f*i/fs).
AudioClip synth_tone(double freq_hz, double duration_s, int sample_rate,
                     double amplitude);

}  // namespace birddet
