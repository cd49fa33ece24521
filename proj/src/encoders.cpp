#include "i2t/encoders.hpp"

#include <cmath>

#include "i2t/errors.hpp"
#include "i2t/objectives.hpp"

namespace i2t {

const char* embedding_source_name(EmbeddingSource s) {
    return s == EmbeddingSource::ImageEncoder ? "image_encoder" : "text_encoder";
}

ImageTensor prepare_encoder_input(const ImageEncoderAdapter& adapter, const ImageTensor& img) {
    if (img.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::DomainMismatch, "encoder input must be unit-domain");
    }
    const auto [h, w] = adapter.input_size();
    if (img.height() == h && img.width() == w) return img;
    return resize_bilinear(img, h, w);
}

Embedding encode_image(const ImageEncoderAdapter& adapter, const ImageTensor& img) {
    const ImageTensor prepared = prepare_encoder_input(adapter, img);
    Embedding e;
    try {
        e = adapter.encode(prepared);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw Error(ErrorCode::EncoderFailure,
                    adapter.encoder_id() + " encode failed: " + ex.what());
    }
    if (e.dim() != adapter.embedding_dim()) {
        throw Error(ErrorCode::EncoderFailure,
                    adapter.encoder_id() + " returned dim " + std::to_string(e.dim()) +
                        ", declared " + std::to_string(adapter.embedding_dim()));
    }
    double norm = 0.0;
    for (double v : e.values) norm += v * v;
    if (!(norm > kZeroNormTolerance * kZeroNormTolerance)) {
        throw Error(ErrorCode::EncoderFailure,
                    adapter.encoder_id() + " returned an all-zero embedding");
    }
    e.source = EmbeddingSource::ImageEncoder;
    return e;
}

Embedding encode_text(const TextEncoderAdapter& adapter, const std::string& text) {
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "encode_text requires nonempty text");
    }
    Embedding e;
    try {
        e = adapter.encode(text);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw Error(ErrorCode::EncoderFailure,
                    adapter.encoder_id() + " encode failed: " + ex.what());
    }
    if (e.dim() != adapter.embedding_dim()) {
        throw Error(ErrorCode::EncoderFailure, adapter.encoder_id() + " returned wrong dim");
    }
    e.source = EmbeddingSource::TextEncoder;
    return e;
}

std::string caption(const CaptionPipelineAdapter& adapter, const ImageTensor& img) {
    if (img.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::DomainMismatch, "caption input must be unit-domain");
    }
    std::string text;
    try {
        text = adapter.caption(img);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw Error(ErrorCode::PipelineFailure,
                    adapter.pipeline_id() + " caption failed: " + ex.what());
    }
    if (text.empty()) {
        throw Error(ErrorCode::PipelineFailure, adapter.pipeline_id() + " produced an empty caption");
    }
    return text;
}

std::vector<double> grad_wrt_image(const ImageEncoderAdapter& adapter, const ImageTensor& img,
                                   const EmbeddingLoss& loss_fn) {
    const auto [h, w] = adapter.input_size();
    if (img.height() != h || img.width() != w) {
        throw Error(ErrorCode::ShapeMismatch, "gradient requires the image at encoder resolution");
    }
    const Embedding e = encode_image(adapter, img);
    const std::vector<double> ge = loss_fn.grad(e.values);
    std::vector<double> gx = adapter.encode_vjp(img, ge);
    for (double v : gx) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteGradient, "non-finite entry in image gradient");
        }
    }
    return gx;
}

}  // namespace i2t
