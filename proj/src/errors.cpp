#include "i2t/errors.hpp"

namespace i2t {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ShapeMismatch: return "shape_mismatch";
        case ErrorCode::DomainMismatch: return "domain_mismatch";
        case ErrorCode::ZeroNorm: return "zero_norm";
        case ErrorCode::NonFiniteGradient: return "non_finite_gradient";
        case ErrorCode::EncoderFailure: return "encoder_failure";
        case ErrorCode::PipelineFailure: return "pipeline_failure";
        case ErrorCode::ModelLoad: return "model_load";
        case ErrorCode::MissingIndex: return "missing_index";
        case ErrorCode::UnreadableImage: return "unreadable_image";
        case ErrorCode::InsufficientSamples: return "insufficient_samples";
        case ErrorCode::EmptyInput: return "empty_input";
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::MissingArtifact: return "missing_artifact";
        case ErrorCode::IoError: return "io_error";
    }
    return "unknown";
}

}  // namespace i2t
