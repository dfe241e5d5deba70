#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace soundstory::scene {

enum class Tool { sfx, tts };
enum class Emotion { neutral, happy, sad, angry };
enum class Gender { male, female };
enum class Role { ambient, foreground };

std::string to_string(Tool t);
std::string to_string(Emotion e);
std::string to_string(Gender g);
std::string to_string(Role r);

// One sound source with its mixing parameters.
struct SoundSpec {
    int id = 0;
    Tool tool = Tool::sfx;
    std::string text;                       // audio caption
    std::optional<std::string> transcript;  // tts only
    std::optional<Emotion> emotion;
    std::optional<Gender> gender;
    double loudness_db = -20.0;  // RMS dBFS target, [-30, -10]
    double panning = 0.0;        // [-1, 1]
    double start_time_s = 0.0;   // [0, 4]
    double duration_s = 1.0;     // > 0, start + duration <= 8
    Role role = Role::foreground;

    bool same_source(const SoundSpec& o) const;  // tool/text/transcript/emotion/gender equal
    bool same_mixing(const SoundSpec& o) const;  // loudness/panning/start/duration equal
};

struct Scene {
    std::string description;
    std::vector<SoundSpec> sounds;  // canonical form: ascending id

    const SoundSpec* find(int id) const;
    std::vector<std::string> captions() const;
    double max_ambient_duration() const;
};

struct EditDelta {
    std::set<int> added;
    std::set<int> removed;
    std::set<int> changed;

    bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
    bool operator==(const EditDelta& o) const = default;
};

struct Violation {
    int id = -1;  // -1 for scene-level rules
    std::string field;
    std::string rule;
};

inline constexpr int kMaxSounds = 10;
inline constexpr double kSceneSeconds = 8.0;
inline constexpr double kMaxStartSeconds = 4.0;
inline constexpr double kLoudnessMinDb = -30.0;
inline constexpr double kLoudnessMaxDb = -10.0;
inline constexpr double kAmbientPanLimit = 0.1;

// Quantization grids used by compact serialization.
inline constexpr double kLoudnessGridDb = 1.0;
inline constexpr double kPanningGrid = 0.1;
inline constexpr double kTimeGridSeconds = 0.25;

// Parse a scene JSON document. Accepts the short field names
// (loudness/panning/start_time/duration) and the _db/_s long forms; `role`
// may be omitted, in which case a sound is inferred ambient when it starts
// at 0, runs for the scene's maximum duration, and is centered.
// Throws SyntaxError / SchemaError / ConstraintError.
Scene parse_scene(const std::string& raw);

std::string to_json(const Scene& scene);

// All invariant violations; empty iff the scene is valid.
std::vector<Violation> validate(const Scene& scene);

// Throws ConstraintError on the first violation (in id order).
void require_valid(const Scene& scene);

// Edit delta between two valid scenes. A shared id whose source fields
// (tool/text/transcript/emotion/gender) differ throws
// SemanticChangeUnderSameId: those edits must be expressed as remove + add.
EditDelta diff(const Scene& prev, const Scene& next);

EditDelta parse_delta(const std::string& raw);
std::string delta_to_json(const EditDelta& delta);

// Canonical single-line token rendering of a valid scene, numeric fields
// quantized to the grids above. parse_compact(serialize_compact(s)) == s up
// to quantization. Throws QuantizationOverflow when a value has no grid
// representation (e.g. a duration that rounds to zero).
std::string serialize_compact(const Scene& scene);
Scene parse_compact(const std::string& text);

double quantize_loudness(double db);
double quantize_panning(double pan);
double quantize_time(double seconds);

}  // namespace soundstory::scene
