#pragma once

#include <stdexcept>
#include <string>

namespace i2t {

enum class ErrorCode {
    ShapeMismatch,
    DomainMismatch,
    ZeroNorm,
    NonFiniteGradient,
    EncoderFailure,
    PipelineFailure,
    ModelLoad,
    MissingIndex,
    UnreadableImage,
    InsufficientSamples,
    EmptyInput,
    InvalidArgument,
    MissingArtifact,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    const char* code_name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace i2t
