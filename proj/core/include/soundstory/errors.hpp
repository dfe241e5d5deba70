#pragma once

#include <stdexcept>
#include <string>

namespace soundstory {

// Base for all library errors. `kind()` is a stable machine-parseable tag
// used by the CLI to build single-line error reports and exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define SOUNDSTORY_ERROR(Name)                                        \
    class Name : public Error {                                      \
    public:                                                           \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

// scene
SOUNDSTORY_ERROR(SyntaxError);
SOUNDSTORY_ERROR(SchemaError);
SOUNDSTORY_ERROR(SemanticChangeUnderSameId);
SOUNDSTORY_ERROR(QuantizationOverflow);

// synth
SOUNDSTORY_ERROR(RangeError);
SOUNDSTORY_ERROR(SilentInput);
SOUNDSTORY_ERROR(UnsupportedDuration);

// codec
SOUNDSTORY_ERROR(ConfigMismatch);
SOUNDSTORY_ERROR(EmptyCorpus);

// model / objective
SOUNDSTORY_ERROR(ShapeMismatch);
SOUNDSTORY_ERROR(TimestepOutOfRange);
SOUNDSTORY_ERROR(DivergenceDetected);
SOUNDSTORY_ERROR(NonFiniteLoss);

// sampler
SOUNDSTORY_ERROR(UnparseableChain);
SOUNDSTORY_ERROR(NonFiniteSample);
SOUNDSTORY_ERROR(PromptStateMissing);

// metrics
SOUNDSTORY_ERROR(UnknownCaption);
SOUNDSTORY_ERROR(EmptyCaptionSet);
SOUNDSTORY_ERROR(WrongArity);

// datagen
SOUNDSTORY_ERROR(NoEditableSound);

// io
SOUNDSTORY_ERROR(IoError);

#undef SOUNDSTORY_ERROR

// Constraint violations carry enough structure for error reports of the
// form "field=loudness_db id=1 bound=[-30,-10] value=-35".
class ConstraintError : public Error {
public:
    ConstraintError(std::string field, int id, std::string bound, std::string value)
        : Error("ConstraintError",
                "field=" + field + " id=" + std::to_string(id) + " bound=" + bound +
                    " value=" + value),
          field_(std::move(field)), id_(id) {}
    const std::string& field() const { return field_; }
    int sound_id() const { return id_; }

private:
    std::string field_;
    int id_;
};

}  // namespace soundstory
