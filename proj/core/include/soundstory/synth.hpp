#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "soundstory/scene.hpp"
#include "soundstory/wav.hpp"

namespace soundstory::synth {

using Mono = Eigen::VectorXf;

enum class GeneratorKind { tonal, noise_band, pulse_train };

// A procedural sound class: a sparse set of spectral lines plus
// kind-specific texture. Lines sit on the 20 Hz grid so the truncated-DCT
// codec passes them without loss.
struct SoundClass {
    std::string name;
    std::string caption;
    GeneratorKind kind = GeneratorKind::tonal;
    std::vector<std::pair<double, double>> lines;  // (freq_hz, amplitude)
    double am_rate_hz = 0.0;                       // pulse/warble modulation
    double am_depth = 0.0;
    double attack = 0.1, sustain = 0.7, release = 0.2;  // envelope fractions
    bool is_voice = false;
    scene::Emotion voice_emotion = scene::Emotion::neutral;
    scene::Gender voice_gender = scene::Gender::female;
    Eigen::VectorXf band_profile;  // L2-normalized centered-dB template
};

class SoundClassRegistry {
public:
    // The shipped world: 16 sfx classes + 4 voice classes.
    static const SoundClassRegistry& builtin();

    explicit SoundClassRegistry(std::vector<SoundClass> classes);

    const std::vector<SoundClass>& classes() const { return classes_; }
    const SoundClass* by_name(const std::string& name) const;
    const SoundClass* by_caption(const std::string& caption) const;
    int num_sfx() const { return num_sfx_; }

    // Exact caption match wins; unknown sfx captions fall back to a stable
    // caption hash; tts specs route by (emotion, gender).
    const SoundClass& class_of(const scene::SoundSpec& spec) const;

    std::string to_json() const;
    static SoundClassRegistry from_json(const std::string& raw);

private:
    std::vector<SoundClass> classes_;
    int num_sfx_ = 0;
};

// Shared band-analysis configuration for registry templates and the oracle
// scorer: 24 log-spaced bands over [40, 200] Hz, 0.5 s window, 10 Hz hop.
inline constexpr int kProfileBands = 24;
inline constexpr double kProfileLoHz = 40.0;
inline constexpr double kProfileHiHz = 200.0;
inline constexpr int kReferenceRateHz = 8000;

// Mono render of one sound at its duration; loudness/panning/placement are
// applied by mix(). Deterministic given the spec's source fields and seed.
Mono render_sound(const scene::SoundSpec& spec, int sample_rate_hz, uint64_t seed,
                  const SoundClassRegistry& registry = SoundClassRegistry::builtin());

// Constant-power pan law; gl^2 + gr^2 == 1.
std::pair<double, double> pan_gains(double panning);

// Scale so the RMS over the active duration hits the dBFS target.
void apply_loudness(Mono& samples, double target_db);
void apply_loudness(AudioBuffer& buffer, double target_db);

double rms(const Mono& samples);

struct MixResult {
    AudioBuffer audio;
    bool clipped = false;
};

// Render, normalize, pan and place every sound of a valid scene; output is
// exactly 8 s of stereo. tanh soft-clip only engages when the plain sum
// leaves [-1, 1] somewhere, and is reported via `clipped`.
MixResult mix(const scene::Scene& sc, int sample_rate_hz, uint64_t seed,
              const SoundClassRegistry& registry = SoundClassRegistry::builtin());

}  // namespace soundstory::synth
