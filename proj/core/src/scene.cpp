#include "soundstory/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "soundstory/errors.hpp"

namespace soundstory::scene {

using json = nlohmann::ordered_json;

std::string to_string(Tool t) { return t == Tool::sfx ? "sfx" : "tts"; }
std::string to_string(Emotion e) {
    switch (e) {
        case Emotion::neutral: return "neutral";
        case Emotion::happy: return "happy";
        case Emotion::sad: return "sad";
        case Emotion::angry: return "angry";
    }
    return "neutral";
}
std::string to_string(Gender g) { return g == Gender::male ? "male" : "female"; }
std::string to_string(Role r) { return r == Role::ambient ? "ambient" : "foreground"; }

namespace {

Tool tool_from_string(const std::string& s) {
    if (s == "sfx") return Tool::sfx;
    if (s == "tts") return Tool::tts;
    throw SchemaError("unknown tool '" + s + "'");
}
Emotion emotion_from_string(const std::string& s) {
    if (s == "neutral") return Emotion::neutral;
    if (s == "happy") return Emotion::happy;
    if (s == "sad") return Emotion::sad;
    if (s == "angry") return Emotion::angry;
    throw SchemaError("unknown emotion '" + s + "'");
}
Gender gender_from_string(const std::string& s) {
    if (s == "male") return Gender::male;
    if (s == "female") return Gender::female;
    throw SchemaError("unknown gender '" + s + "'");
}
Role role_from_string(const std::string& s) {
    if (s == "ambient") return Role::ambient;
    if (s == "foreground") return Role::foreground;
    throw SchemaError("unknown role '" + s + "'");
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

bool SoundSpec::same_source(const SoundSpec& o) const {
    return tool == o.tool && text == o.text && transcript == o.transcript &&
           emotion == o.emotion && gender == o.gender;
}

bool SoundSpec::same_mixing(const SoundSpec& o) const {
    return near(loudness_db, o.loudness_db) && near(panning, o.panning) &&
           near(start_time_s, o.start_time_s) && near(duration_s, o.duration_s);
}

const SoundSpec* Scene::find(int id) const {
    for (const auto& s : sounds)
        if (s.id == id) return &s;
    return nullptr;
}

std::vector<std::string> Scene::captions() const {
    std::vector<std::string> out;
    out.reserve(sounds.size());
    for (const auto& s : sounds) out.push_back(s.text);
    return out;
}

double Scene::max_ambient_duration() const {
    double d = 0.0;
    for (const auto& s : sounds)
        if (s.role == Role::ambient) d = std::max(d, s.duration_s);
    return d;
}

namespace {

double require_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw SchemaError("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

SoundSpec parse_sound(const json& j, bool& role_given) {
    if (!j.is_object()) throw SchemaError("sound entry must be an object");

    static const std::map<std::string, std::string> aliases = {
        {"loudness_db", "loudness"}, {"start_time_s", "start_time"},
        {"duration_s", "duration"}};
    static const std::set<std::string> known = {
        "tool", "text", "transcript", "emotion", "gender", "loudness",
        "panning", "start_time", "duration", "id", "role"};

    json flat = json::object();
    for (const auto& [key, value] : j.items()) {
        std::string k = key;
        if (auto it = aliases.find(k); it != aliases.end()) k = it->second;
        if (!known.count(k)) throw SchemaError("unknown field '" + key + "'");
        if (flat.contains(k)) throw SchemaError("duplicate field '" + key + "'");
        flat[k] = value;
    }
    for (const char* req : {"tool", "text", "loudness", "panning", "start_time", "duration", "id"})
        if (!flat.contains(req)) throw SchemaError(std::string("missing field '") + req + "'");

    SoundSpec s;
    if (!flat["id"].is_number_integer() || flat["id"].get<long>() < 0)
        throw SchemaError("field 'id' must be a non-negative integer");
    s.id = flat["id"].get<int>();
    if (!flat["tool"].is_string()) throw SchemaError("field 'tool' must be a string");
    s.tool = tool_from_string(flat["tool"].get<std::string>());
    if (!flat["text"].is_string()) throw SchemaError("field 'text' must be a string");
    s.text = flat["text"].get<std::string>();
    s.loudness_db = require_number(flat, "loudness");
    s.panning = require_number(flat, "panning");
    s.start_time_s = require_number(flat, "start_time");
    s.duration_s = require_number(flat, "duration");
    if (flat.contains("transcript")) {
        if (!flat["transcript"].is_string()) throw SchemaError("field 'transcript' must be a string");
        s.transcript = flat["transcript"].get<std::string>();
    }
    if (flat.contains("emotion")) {
        if (!flat["emotion"].is_string()) throw SchemaError("field 'emotion' must be a string");
        s.emotion = emotion_from_string(flat["emotion"].get<std::string>());
    }
    if (flat.contains("gender")) {
        if (!flat["gender"].is_string()) throw SchemaError("field 'gender' must be a string");
        s.gender = gender_from_string(flat["gender"].get<std::string>());
    }
    role_given = flat.contains("role");
    if (role_given) {
        if (!flat["role"].is_string()) throw SchemaError("field 'role' must be a string");
        s.role = role_from_string(flat["role"].get<std::string>());
    }
    return s;
}

}  // namespace

Scene parse_scene(const std::string& raw) {
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what());
    }
    if (!doc.is_object()) throw SchemaError("scene document must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "description" && key != "sounds")
            throw SchemaError("unknown field '" + key + "'");
    }
    if (!doc.contains("description") || !doc["description"].is_string())
        throw SchemaError("missing string field 'description'");
    if (!doc.contains("sounds") || !doc["sounds"].is_array())
        throw SchemaError("missing array field 'sounds'");

    Scene scene;
    scene.description = doc["description"].get<std::string>();
    std::vector<bool> role_given;
    for (const auto& item : doc["sounds"]) {
        bool given = false;
        scene.sounds.push_back(parse_sound(item, given));
        role_given.push_back(given);
    }

    // Role inference for paper-style JSON: a sound that starts at zero,
    // spans the scene's longest duration, and is centered acts as ambience.
    double max_dur = 0.0;
    for (const auto& s : scene.sounds) max_dur = std::max(max_dur, s.duration_s);
    for (size_t i = 0; i < scene.sounds.size(); ++i) {
        if (role_given[i]) continue;
        auto& s = scene.sounds[i];
        const bool ambient = near(s.start_time_s, 0.0) && near(s.duration_s, max_dur) &&
                             std::abs(s.panning) <= kAmbientPanLimit + 1e-9;
        s.role = ambient ? Role::ambient : Role::foreground;
    }

    std::stable_sort(scene.sounds.begin(), scene.sounds.end(),
                     [](const SoundSpec& a, const SoundSpec& b) { return a.id < b.id; });
    require_valid(scene);
    return scene;
}

std::string to_json(const Scene& scene) {
    json doc;
    doc["description"] = scene.description;
    doc["sounds"] = json::array();
    for (const auto& s : scene.sounds) {
        json j;
        j["tool"] = to_string(s.tool);
        j["text"] = s.text;
        if (s.transcript) j["transcript"] = *s.transcript;
        if (s.emotion) j["emotion"] = to_string(*s.emotion);
        if (s.gender) j["gender"] = to_string(*s.gender);
        j["loudness"] = s.loudness_db;
        j["panning"] = s.panning;
        j["start_time"] = s.start_time_s;
        j["duration"] = s.duration_s;
        j["id"] = s.id;
        j["role"] = to_string(s.role);
        doc["sounds"].push_back(std::move(j));
    }
    return doc.dump(2);
}

std::vector<Violation> validate(const Scene& scene) {
    std::vector<Violation> out;
    const auto add = [&](int id, const std::string& field, const std::string& rule) {
        out.push_back(Violation{id, field, rule});
    };

    if (int(scene.sounds.size()) > kMaxSounds) add(-1, "sounds", "too_many_sounds");

    std::set<int> seen;
    for (const auto& s : scene.sounds) {
        if (!seen.insert(s.id).second) add(s.id, "id", "duplicate_id");
        if (s.id < 0) add(s.id, "id", "id_non_negative");
        if (s.loudness_db < kLoudnessMinDb - 1e-9 || s.loudness_db > kLoudnessMaxDb + 1e-9)
            add(s.id, "loudness_db", "loudness_range");
        if (s.panning < -1.0 - 1e-9 || s.panning > 1.0 + 1e-9)
            add(s.id, "panning", "panning_range");
        if (s.role == Role::ambient && std::abs(s.panning) > kAmbientPanLimit + 1e-9)
            add(s.id, "panning", "ambient_panning");
        if (s.start_time_s < -1e-9 || s.start_time_s > kMaxStartSeconds + 1e-9)
            add(s.id, "start_time_s", "start_range");
        if (s.duration_s <= 1e-9) add(s.id, "duration_s", "duration_positive");
        if (s.start_time_s + s.duration_s > kSceneSeconds + 1e-9)
            add(s.id, "start_time_s", "start_plus_duration");
        if (s.role == Role::ambient && !near(s.start_time_s, 0.0))
            add(s.id, "start_time_s", "ambient_start_zero");
        if (s.tool == Tool::tts && (!s.transcript || s.transcript->empty()))
            add(s.id, "transcript", "tts_transcript_required");
    }

    const bool any_ambient =
        std::any_of(scene.sounds.begin(), scene.sounds.end(),
                    [](const SoundSpec& s) { return s.role == Role::ambient; });
    if (!any_ambient) {
        add(-1, "sounds", "ambient_required");
    } else {
        const double amb = scene.max_ambient_duration();
        for (const auto& s : scene.sounds)
            if (s.role == Role::foreground && s.start_time_s + s.duration_s > amb + 1e-9)
                add(s.id, "duration_s", "foreground_exceeds_ambience");
    }
    return out;
}

void require_valid(const Scene& scene) {
    const auto violations = validate(scene);
    if (violations.empty()) return;
    const auto& v = violations.front();
    std::string bound = v.rule;
    if (v.rule == "loudness_range") bound = "[-30,-10]";
    else if (v.rule == "panning_range") bound = "[-1,1]";
    else if (v.rule == "ambient_panning") bound = "[-0.1,0.1]";
    else if (v.rule == "start_range") bound = "[0,4]";
    else if (v.rule == "start_plus_duration") bound = "start+duration<=8";
    std::string value = "n/a";
    if (const SoundSpec* s = scene.find(v.id)) {
        if (v.field == "loudness_db") value = fmt(s->loudness_db);
        else if (v.field == "panning") value = fmt(s->panning);
        else if (v.field == "start_time_s") value = fmt(s->start_time_s);
        else if (v.field == "duration_s") value = fmt(s->duration_s);
    }
    throw ConstraintError(v.field, v.id, bound, value);
}

EditDelta diff(const Scene& prev, const Scene& next) {
    EditDelta d;
    for (const auto& s : next.sounds)
        if (!prev.find(s.id)) d.added.insert(s.id);
    for (const auto& s : prev.sounds) {
        const SoundSpec* n = next.find(s.id);
        if (!n) {
            d.removed.insert(s.id);
            continue;
        }
        if (!s.same_source(*n))
            throw SemanticChangeUnderSameId(
                "sound id " + std::to_string(s.id) +
                " changes tool/text under the same id; re-id as remove+add");
        if (!s.same_mixing(*n)) d.changed.insert(s.id);
    }
    return d;
}

EditDelta parse_delta(const std::string& raw) {
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what());
    }
    if (!doc.is_object()) throw SchemaError("delta document must be an object");
    EditDelta d;
    for (const auto& [key, value] : doc.items()) {
        std::set<int>* target = nullptr;
        if (key == "added") target = &d.added;
        else if (key == "removed") target = &d.removed;
        else if (key == "changed") target = &d.changed;
        else throw SchemaError("unknown field '" + key + "'");
        if (!value.is_array()) throw SchemaError("field '" + key + "' must be an array");
        for (const auto& v : value) {
            if (!v.is_number_integer()) throw SchemaError("ids must be integers");
            target->insert(v.get<int>());
        }
    }
    for (int id : d.added)
        if (d.removed.count(id) || d.changed.count(id))
            throw SchemaError("delta sets must be pairwise disjoint");
    for (int id : d.removed)
        if (d.changed.count(id)) throw SchemaError("delta sets must be pairwise disjoint");
    return d;
}

std::string delta_to_json(const EditDelta& delta) {
    json doc;
    doc["added"] = delta.added;
    doc["removed"] = delta.removed;
    doc["changed"] = delta.changed;
    return doc.dump();
}

double quantize_loudness(double db) { return std::round(db / kLoudnessGridDb) * kLoudnessGridDb; }
double quantize_panning(double pan) {
    double q = std::round(pan / kPanningGrid) * kPanningGrid;
    if (q == 0.0) q = 0.0;  // normalize -0.0
    return q;
}
double quantize_time(double seconds) {
    return std::round(seconds / kTimeGridSeconds) * kTimeGridSeconds;
}

namespace {

std::string loudness_token(double db) {
    const double q = quantize_loudness(db);
    if (q < kLoudnessMinDb - 1e-9 || q > kLoudnessMaxDb + 1e-9)
        throw QuantizationOverflow("loudness " + fmt(db) + " outside grid [-30,-10]");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "L%d", int(std::lround(q)));
    return buf;
}

std::string panning_token(double pan) {
    const double q = quantize_panning(pan);
    if (q < -1.0 - 1e-9 || q > 1.0 + 1e-9)
        throw QuantizationOverflow("panning " + fmt(pan) + " outside grid [-1,1]");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%+.1f", q + 0.0);
    return buf;
}

std::string start_token(double s) {
    const double q = quantize_time(s);
    if (q < -1e-9 || q > kMaxStartSeconds + 1e-9)
        throw QuantizationOverflow("start_time " + fmt(s) + " outside grid [0,4]");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%.2f", q);
    return buf;
}

std::string duration_token(double s) {
    const double q = quantize_time(s);
    if (q < kTimeGridSeconds - 1e-9 || q > kSceneSeconds + 1e-9)
        throw QuantizationOverflow("duration " + fmt(s) + " outside grid (0,8]");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "D%.2f", q);
    return buf;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::istringstream in(text);
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

}  // namespace

std::string serialize_compact(const Scene& scene) {
    require_valid(scene);
    std::ostringstream out;
    out << "DESC";
    for (const auto& w : split_words(scene.description)) out << ' ' << w;
    for (const auto& s : scene.sounds) {
        out << " | SND #" << s.id << ' ' << to_string(s.tool);
        for (const auto& w : split_words(s.text)) out << ' ' << w;
        if (s.tool == Tool::tts) {
            out << " TXT";
            for (const auto& w : split_words(s.transcript.value_or(""))) out << ' ' << w;
            out << " EMO " << to_string(s.emotion.value_or(Emotion::neutral));
            out << " GEN " << to_string(s.gender.value_or(Gender::female));
        }
        out << ' ' << loudness_token(s.loudness_db);
        out << ' ' << panning_token(s.panning);
        out << ' ' << start_token(s.start_time_s);
        out << ' ' << duration_token(s.duration_s);
        out << ' ' << (s.role == Role::ambient ? "AMB" : "FG");
    }
    return out.str();
}

Scene parse_compact(const std::string& text) {
    const auto tokens = split_words(text);
    size_t i = 0;
    const auto fail = [&](const std::string& why) -> void {
        throw SyntaxError("compact scene: " + why + " (token " + std::to_string(i) + ")");
    };
    const auto peek = [&]() -> const std::string& {
        static const std::string empty;
        return i < tokens.size() ? tokens[i] : empty;
    };
    const auto next = [&]() -> const std::string& {
        if (i >= tokens.size()) fail("unexpected end");
        return tokens[i++];
    };

    Scene scene;
    if (peek() != "DESC") fail("expected DESC");
    ++i;
    std::string desc;
    while (i < tokens.size() && tokens[i] != "|") {
        if (!desc.empty()) desc += ' ';
        desc += tokens[i++];
    }
    scene.description = desc;

    while (i < tokens.size()) {
        if (next() != "|") fail("expected |");
        if (next() != "SND") fail("expected SND");
        SoundSpec s;
        const std::string& idtok = next();
        if (idtok.size() < 2 || idtok[0] != '#') fail("expected #id");
        try {
            s.id = std::stoi(idtok.substr(1));
        } catch (...) {
            fail("bad id token");
        }
        s.tool = tool_from_string(next());

        const auto is_value_token = [](const std::string& t) {
            return t.size() >= 2 && (t[0] == 'L' || t[0] == 'P' || t[0] == 'S' || t[0] == 'D') &&
                   (std::isdigit(uint8_t(t[1])) || t[1] == '-' || t[1] == '+');
        };
        std::string caption;
        while (i < tokens.size() && tokens[i] != "TXT" && !is_value_token(tokens[i])) {
            if (!caption.empty()) caption += ' ';
            caption += tokens[i++];
        }
        s.text = caption;
        if (peek() == "TXT") {
            ++i;
            std::string transcript;
            while (i < tokens.size() && tokens[i] != "EMO") {
                if (!transcript.empty()) transcript += ' ';
                transcript += tokens[i++];
            }
            s.transcript = transcript;
            if (next() != "EMO") fail("expected EMO");
            s.emotion = emotion_from_string(next());
            if (next() != "GEN") fail("expected GEN");
            s.gender = gender_from_string(next());
        }
        try {
            const std::string& l = next();
            if (l[0] != 'L') fail("expected L token");
            s.loudness_db = std::stod(l.substr(1));
            const std::string& p = next();
            if (p[0] != 'P') fail("expected P token");
            s.panning = std::stod(p.substr(1));
            const std::string& st = next();
            if (st[0] != 'S') fail("expected S token");
            s.start_time_s = std::stod(st.substr(1));
            const std::string& d = next();
            if (d[0] != 'D') fail("expected D token");
            s.duration_s = std::stod(d.substr(1));
        } catch (const Error&) {
            throw;
        } catch (...) {
            fail("bad numeric token");
        }
        const std::string& role = next();
        if (role == "AMB") s.role = Role::ambient;
        else if (role == "FG") s.role = Role::foreground;
        else fail("expected AMB or FG");
        scene.sounds.push_back(std::move(s));
    }

    std::stable_sort(scene.sounds.begin(), scene.sounds.end(),
                     [](const SoundSpec& a, const SoundSpec& b) { return a.id < b.id; });
    require_valid(scene);
    return scene;
}

}  // namespace soundstory::scene
