#include "soundstory/synth.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "soundstory/dsp.hpp"
#include "soundstory/errors.hpp"
#include "soundstory/rng.hpp"

namespace soundstory::synth {

using json = nlohmann::ordered_json;
using scene::Emotion;
using scene::Gender;
using scene::SoundSpec;
using scene::Tool;

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string kind_name(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::tonal: return "tonal";
        case GeneratorKind::noise_band: return "noise-band";
        case GeneratorKind::pulse_train: return "pulse-train";
    }
    return "tonal";
}
GeneratorKind kind_from_name(const std::string& s) {
    if (s == "tonal") return GeneratorKind::tonal;
    if (s == "noise-band") return GeneratorKind::noise_band;
    if (s == "pulse-train") return GeneratorKind::pulse_train;
    throw SchemaError("unknown generator kind '" + s + "'");
}

SoundClass sfx(const std::string& name, const std::string& caption, GeneratorKind kind,
               std::vector<std::pair<double, double>> lines, double am_rate, double am_depth,
               double attack, double sustain, double release) {
    SoundClass c;
    c.name = name;
    c.caption = caption;
    c.kind = kind;
    c.lines = std::move(lines);
    c.am_rate_hz = am_rate;
    c.am_depth = am_depth;
    c.attack = attack;
    c.sustain = sustain;
    c.release = release;
    return c;
}

SoundClass voice(const std::string& name, const std::string& caption, double f0,
                 std::vector<std::pair<double, double>> lines, Emotion e, Gender g) {
    SoundClass c;
    c.name = name;
    c.caption = caption;
    c.kind = GeneratorKind::pulse_train;
    c.lines = std::move(lines);
    c.am_rate_hz = f0 > 70.0 ? 4.0 : 3.2;  // syllable-scale pulsing
    c.am_depth = 0.25;
    c.attack = 0.08;
    c.sustain = 0.82;
    c.release = 0.10;
    c.is_voice = true;
    c.voice_emotion = e;
    c.voice_gender = g;
    return c;
}

std::vector<SoundClass> builtin_classes() {
    using GK = GeneratorKind;
    std::vector<SoundClass> v;
    // sfx: each class owns a distinct pair of 20 Hz-grid lines in [40, 180].
    v.push_back(sfx("foghorn", "a deep foghorn sounding in the distance", GK::tonal,
                    {{40, 1.0}, {100, 0.55}}, 0.4, 0.35, 0.20, 0.55, 0.25));
    v.push_back(sfx("cello", "a low cello drone", GK::tonal,
                    {{60, 1.0}, {120, 0.55}}, 0.0, 0.0, 0.15, 0.70, 0.15));
    v.push_back(sfx("hum", "a refrigerator humming in a kitchen", GK::tonal,
                    {{80, 1.0}, {160, 0.5}}, 0.0, 0.0, 0.10, 0.80, 0.10));
    v.push_back(sfx("engine", "an old engine idling", GK::tonal,
                    {{100, 1.0}, {140, 0.6}}, 9.0, 0.2, 0.10, 0.78, 0.12));
    v.push_back(sfx("bell", "a monastery bell tolling", GK::tonal,
                    {{120, 1.0}, {180, 0.55}}, 1.0, 0.45, 0.02, 0.63, 0.35));
    v.push_back(sfx("birdsong", "gentle birdsong outside a window", GK::tonal,
                    {{160, 1.0}, {60, 0.4}}, 6.0, 0.5, 0.10, 0.75, 0.15));
    v.push_back(sfx("thunder", "distant rolling thunder", GK::noise_band,
                    {{40, 1.0}, {60, 0.7}}, 0.7, 0.3, 0.15, 0.55, 0.30));
    v.push_back(sfx("waves", "waves lapping on a shore", GK::noise_band,
                    {{60, 1.0}, {80, 0.7}}, 0.25, 0.4, 0.20, 0.60, 0.20));
    v.push_back(sfx("river", "a river flowing over rocks", GK::noise_band,
                    {{80, 1.0}, {100, 0.7}}, 0.0, 0.0, 0.12, 0.76, 0.12));
    v.push_back(sfx("rain", "steady rainfall on a roof", GK::noise_band,
                    {{140, 1.0}, {180, 0.65}}, 0.0, 0.0, 0.12, 0.76, 0.12));
    v.push_back(sfx("wind", "wind whistling through trees", GK::noise_band,
                    {{120, 1.0}, {160, 0.7}}, 0.3, 0.35, 0.20, 0.60, 0.20));
    v.push_back(sfx("fire", "a crackling campfire", GK::noise_band,
                    {{40, 1.0}, {140, 0.6}}, 5.0, 0.3, 0.12, 0.76, 0.12));
    v.push_back(sfx("clock", "an antique clock ticking softly", GK::pulse_train,
                    {{80, 1.0}, {120, 0.6}}, 2.0, 0.9, 0.05, 0.85, 0.10));
    v.push_back(sfx("footsteps", "heavy footsteps on a wooden floor", GK::pulse_train,
                    {{40, 1.0}, {80, 0.55}}, 3.5, 0.9, 0.05, 0.85, 0.10));
    v.push_back(sfx("hooves", "galloping horse hooves on a road", GK::pulse_train,
                    {{100, 1.0}, {180, 0.5}}, 7.0, 0.85, 0.05, 0.85, 0.10));
    v.push_back(sfx("helicopter", "a helicopter rotor thumping overhead", GK::pulse_train,
                    {{140, 1.0}, {60, 0.55}}, 11.0, 0.8, 0.08, 0.82, 0.10));
    // voices: pulse stacks at the speaker's fundamental.
    v.push_back(voice("voice_nm", "a calm male voice speaking", 55.0,
                      {{55, 1.0}, {110, 0.6}, {165, 0.3}}, Emotion::neutral, Gender::male));
    v.push_back(voice("voice_nf", "a calm female voice speaking", 82.5,
                      {{82.5, 1.0}, {165, 0.55}}, Emotion::neutral, Gender::female));
    v.push_back(voice("voice_hm", "an excited male voice speaking", 65.0,
                      {{65, 1.0}, {130, 0.65}}, Emotion::happy, Gender::male));
    v.push_back(voice("voice_hf", "an excited female voice speaking", 95.0,
                      {{95, 1.0}, {170, 0.5}}, Emotion::happy, Gender::female));
    return v;
}

// Reference spec used to derive the stored band template of a class.
SoundSpec reference_spec(const SoundClass& c) {
    SoundSpec s;
    s.id = 0;
    s.text = c.caption;
    s.duration_s = 2.0;
    s.loudness_db = -14.0;
    if (c.is_voice) {
        s.tool = Tool::tts;
        s.transcript = "hello there";
        s.emotion = c.voice_emotion;
        s.gender = c.voice_gender;
    }
    return s;
}

}  // namespace

SoundClassRegistry::SoundClassRegistry(std::vector<SoundClass> classes)
    : classes_(std::move(classes)) {
    for (const auto& c : classes_)
        if (!c.is_voice) ++num_sfx_;
    // Derive missing band templates from a reference render.
    dsp::BandAnalyzer analyzer(kReferenceRateHz, kProfileBands, kProfileLoHz, kProfileHiHz);
    for (auto& c : classes_) {
        if (c.band_profile.size() == kProfileBands) continue;
        Mono ref = render_sound(reference_spec(c), kReferenceRateHz, 0, *this);
        const auto energies = analyzer.analyze(ref);
        Eigen::VectorXf profile = Eigen::VectorXf::Zero(kProfileBands);
        int used = 0;
        for (int f = 0; f < energies.rows(); ++f) {
            // interior frames only: window fully inside the render
            if ((f + 1) * analyzer.hop_samples() + analyzer.window_samples() > ref.size()) break;
            profile += dsp::centered_db_profile(energies.row(f).transpose());
            ++used;
        }
        if (used > 0) profile /= float(used);
        const float n = profile.norm();
        if (n > 1e-6f) profile /= n;
        c.band_profile = profile;
    }
}

const SoundClassRegistry& SoundClassRegistry::builtin() {
    static const SoundClassRegistry reg{builtin_classes()};
    return reg;
}

const SoundClass* SoundClassRegistry::by_name(const std::string& name) const {
    for (const auto& c : classes_)
        if (c.name == name) return &c;
    return nullptr;
}

const SoundClass* SoundClassRegistry::by_caption(const std::string& caption) const {
    for (const auto& c : classes_)
        if (c.caption == caption) return &c;
    return nullptr;
}

const SoundClass& SoundClassRegistry::class_of(const SoundSpec& spec) const {
    if (spec.tool == Tool::tts) {
        const Emotion e = spec.emotion.value_or(Emotion::neutral);
        const Gender g = spec.gender.value_or(Gender::female);
        const bool excited = (e == Emotion::happy || e == Emotion::angry);
        const std::string name =
            std::string("voice_") + (excited ? "h" : "n") + (g == Gender::male ? "m" : "f");
        const SoundClass* c = by_name(name);
        if (!c) throw SchemaError("registry has no voice class '" + name + "'");
        return *c;
    }
    if (const SoundClass* c = by_caption(spec.text)) return *c;
    // stable fallback for unregistered captions
    int idx = int(fnv1a(spec.text) % uint64_t(std::max(1, num_sfx_)));
    int seen = 0;
    for (const auto& c : classes_) {
        if (c.is_voice) continue;
        if (seen == idx) return c;
        ++seen;
    }
    throw SchemaError("registry is empty");
}

std::string SoundClassRegistry::to_json() const {
    json doc = json::array();
    for (const auto& c : classes_) {
        json j;
        j["name"] = c.name;
        j["caption"] = c.caption;
        j["kind"] = kind_name(c.kind);
        j["lines"] = json::array();
        for (const auto& [f, a] : c.lines) j["lines"].push_back({f, a});
        j["am_rate_hz"] = c.am_rate_hz;
        j["am_depth"] = c.am_depth;
        j["envelope"] = {c.attack, c.sustain, c.release};
        if (c.is_voice) {
            j["voice"] = {{"emotion", scene::to_string(c.voice_emotion)},
                          {"gender", scene::to_string(c.voice_gender)}};
        }
        j["band_profile"] = std::vector<float>(c.band_profile.data(),
                                               c.band_profile.data() + c.band_profile.size());
        doc.push_back(std::move(j));
    }
    return doc.dump(2);
}

SoundClassRegistry SoundClassRegistry::from_json(const std::string& raw) {
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what());
    }
    if (!doc.is_array()) throw SchemaError("registry document must be an array");
    std::vector<SoundClass> classes;
    for (const auto& j : doc) {
        SoundClass c;
        c.name = j.at("name").get<std::string>();
        c.caption = j.at("caption").get<std::string>();
        c.kind = kind_from_name(j.at("kind").get<std::string>());
        for (const auto& l : j.at("lines"))
            c.lines.emplace_back(l.at(0).get<double>(), l.at(1).get<double>());
        c.am_rate_hz = j.at("am_rate_hz").get<double>();
        c.am_depth = j.at("am_depth").get<double>();
        c.attack = j.at("envelope").at(0).get<double>();
        c.sustain = j.at("envelope").at(1).get<double>();
        c.release = j.at("envelope").at(2).get<double>();
        if (j.contains("voice")) {
            c.is_voice = true;
            const std::string e = j["voice"].at("emotion").get<std::string>();
            c.voice_emotion = e == "happy"    ? Emotion::happy
                              : e == "sad"    ? Emotion::sad
                              : e == "angry"  ? Emotion::angry
                                              : Emotion::neutral;
            c.voice_gender = j["voice"].at("gender").get<std::string>() == "male"
                                 ? Gender::male
                                 : Gender::female;
        }
        if (j.contains("band_profile")) {
            const auto p = j["band_profile"].get<std::vector<float>>();
            c.band_profile = Eigen::Map<const Eigen::VectorXf>(p.data(), p.size());
        }
        classes.push_back(std::move(c));
    }
    return SoundClassRegistry(std::move(classes));
}

namespace {

struct Component {
    double freq, amp, phase;
};

// Texture components around each line; dominant lines stay phase-aligned to
// the half-sample DCT convention so the codec passes them unchanged.
std::vector<Component> build_components(const SoundClass& cls, Rng& rng, double nyquist_cap) {
    std::vector<Component> comps;
    for (const auto& [f, a] : cls.lines) {
        if (f >= nyquist_cap) continue;
        comps.push_back({f, a, 0.0});
        if (cls.kind == GeneratorKind::noise_band) {
            for (int k = 0; k < 6; ++k) {
                const double df = rng.uniform(-8.0, 8.0);
                if (f + df <= 0 || f + df >= nyquist_cap) continue;
                comps.push_back({f + df, a * 0.28 * (0.5 + rng.uniform()),
                                 rng.uniform(0.0, 2.0 * M_PI)});
            }
        } else if (cls.kind == GeneratorKind::pulse_train) {
            // comb partials at the pulse rate around each line
            for (int k = 1; k <= 3; ++k) {
                for (double sgn : {-1.0, 1.0}) {
                    const double fp = f + sgn * k * std::max(cls.am_rate_hz, 1.0);
                    if (fp <= 0 || fp >= nyquist_cap) continue;
                    comps.push_back({fp, a * 0.30 / k, 0.0});
                }
            }
        }
    }
    return comps;
}

}  // namespace

Mono render_sound(const SoundSpec& spec, int sample_rate_hz, uint64_t seed,
                  const SoundClassRegistry& registry) {
    if (spec.duration_s > scene::kSceneSeconds + 1e-9)
        throw UnsupportedDuration("duration " + std::to_string(spec.duration_s) +
                                  " exceeds the 8 s scene cap");
    if (sample_rate_hz <= 0) throw RangeError("sample rate must be positive");

    const SoundClass& cls = registry.class_of(spec);
    const long n = std::lround(spec.duration_s * sample_rate_hz);
    Mono out = Mono::Zero(n);
    if (n == 0) return out;

    Rng rng(mix_seed(seed, fnv1a(cls.name), fnv1a(spec.transcript.value_or(""))));
    const double nyquist_cap = sample_rate_hz / 4.0;  // keep renders band-limited
    const auto comps = build_components(cls, rng, nyquist_cap);

    double amp_sum = 0.0;
    for (const auto& c : comps) amp_sum += c.amp;
    const double norm = amp_sum > 0 ? 0.9 / amp_sum : 0.0;

    for (const auto& c : comps) {
        const double w = 2.0 * M_PI * c.freq / sample_rate_hz;
        for (long i = 0; i < n; ++i)
            out[i] += float(norm * c.amp * std::cos(w * (i + 0.5) + c.phase));
    }

    // amplitude modulation: peaked gate for pulse trains, smooth elsewhere
    if (cls.am_rate_hz > 0.0 && cls.am_depth > 0.0) {
        for (long i = 0; i < n; ++i) {
            const double t = (i + 0.5) / sample_rate_hz;
            double m;
            if (cls.kind == GeneratorKind::pulse_train) {
                const double c = 0.5 + 0.5 * std::cos(2.0 * M_PI * cls.am_rate_hz * t);
                m = (1.0 - cls.am_depth) + cls.am_depth * c * c * c;
            } else {
                m = 1.0 - cls.am_depth * (0.5 + 0.5 * std::sin(2.0 * M_PI * cls.am_rate_hz * t));
            }
            out[i] *= float(m);
        }
    }

    // syllable gating for speech, derived from the transcript
    if (cls.is_voice && spec.transcript && !spec.transcript->empty()) {
        std::vector<size_t> lens;
        std::istringstream in(*spec.transcript);
        std::string w;
        size_t total = 0;
        while (in >> w) {
            lens.push_back(w.size());
            total += w.size();
        }
        if (!lens.empty() && total > 0) {
            long pos = 0;
            for (size_t wi = 0; wi < lens.size(); ++wi) {
                const long seg = (wi + 1 == lens.size()) ? n - pos
                                                         : long(n * double(lens[wi]) / total);
                const long voiced = long(seg * 0.82);
                for (long i = 0; i < seg && pos + i < n; ++i) {
                    double g = 0.0;
                    if (i < voiced && voiced > 0)
                        g = 0.5 - 0.5 * std::cos(2.0 * M_PI * (i + 0.5) / voiced);
                    out[pos + i] *= float(0.15 + 0.85 * g);
                }
                pos += seg;
            }
        }
    }

    // attack / sustain / release envelope
    const long na = std::lround(cls.attack * n);
    const long nr = std::lround(cls.release * n);
    for (long i = 0; i < na; ++i) out[i] *= float(0.5 - 0.5 * std::cos(M_PI * (i + 0.5) / na));
    for (long i = 0; i < nr; ++i)
        out[n - 1 - i] *= float(0.5 - 0.5 * std::cos(M_PI * (i + 0.5) / nr));
    return out;
}

std::pair<double, double> pan_gains(double panning) {
    if (panning < -1.0 || panning > 1.0)
        throw RangeError("panning " + std::to_string(panning) + " outside [-1,1]");
    const double a = (panning + 1.0) * M_PI / 4.0;
    return {std::cos(a), std::sin(a)};
}

double rms(const Mono& samples) {
    if (samples.size() == 0) return 0.0;
    return std::sqrt(samples.cast<double>().array().square().mean());
}

void apply_loudness(Mono& samples, double target_db) {
    const double r = rms(samples);
    if (r <= 1e-9) throw SilentInput("buffer RMS below 1e-9");
    samples *= float(std::pow(10.0, target_db / 20.0) / r);
}

void apply_loudness(AudioBuffer& buffer, double target_db) {
    const double r = std::sqrt(buffer.samples.cast<double>().array().square().mean());
    if (r <= 1e-9) throw SilentInput("buffer RMS below 1e-9");
    buffer.samples *= float(std::pow(10.0, target_db / 20.0) / r);
}

MixResult mix(const scene::Scene& sc, int sample_rate_hz, uint64_t seed,
              const SoundClassRegistry& registry) {
    scene::require_valid(sc);
    const long total = std::lround(scene::kSceneSeconds * sample_rate_hz);
    MixResult result;
    result.audio = AudioBuffer::silence(sample_rate_hz, total);
    auto& s = result.audio.samples;

    for (const auto& sound : sc.sounds) {
        Mono m = render_sound(sound, sample_rate_hz, seed, registry);
        apply_loudness(m, sound.loudness_db);
        const auto [gl, gr] = pan_gains(sound.panning);
        const long off = std::lround(sound.start_time_s * sample_rate_hz);
        const long len = std::min<long>(m.size(), total - off);
        for (long i = 0; i < len; ++i) {
            s(0, off + i) += float(gl) * m[i];
            s(1, off + i) += float(gr) * m[i];
        }
    }

    const float peak = s.array().abs().maxCoeff();
    if (peak > 1.0f) {
        result.clipped = true;
        s = s.array().tanh().matrix();
    }
    return result;
}

}  // namespace soundstory::synth
