#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "i2t/embedding.hpp"
#include "i2t/image.hpp"

namespace i2t {

/// Adapter over an image encoder (the gray-box attack surface). Implementations
/// must be deterministic and read-only after construction; concurrent encode and
/// encode_vjp calls are permitted.
class ImageEncoderAdapter {
public:
    virtual ~ImageEncoderAdapter() = default;

    virtual const std::string& encoder_id() const = 0;
    virtual int embedding_dim() const = 0;
    /// Expected (height, width) of the input image.
    virtual std::pair<int, int> input_size() const = 0;

    /// img must be unit-domain at exactly input_size().
    virtual Embedding encode(const ImageTensor& img) const = 0;

    /// Vector-Jacobian product: gradient of <encode(img), cotangent> with
    /// respect to img, flattened in image layout. cotangent has embedding_dim
    /// entries.
    virtual std::vector<double> encode_vjp(const ImageTensor& img,
                                           std::span<const double> cotangent) const = 0;
};

class TextEncoderAdapter {
public:
    virtual ~TextEncoderAdapter() = default;

    virtual const std::string& encoder_id() const = 0;
    virtual int embedding_dim() const = 0;
    virtual Embedding encode(const std::string& text) const = 0;
};

struct Decoding {
    enum class Kind { Greedy, Beam };
    Kind kind = Kind::Greedy;
    int beam_width = 1;
};

/// End-to-end captioning pipeline. Evaluation-only: the attack engine never
/// touches this interface.
class CaptionPipelineAdapter {
public:
    virtual ~CaptionPipelineAdapter() = default;

    virtual const std::string& pipeline_id() const = 0;
    virtual Decoding decoding() const { return {}; }
    virtual std::string caption(const ImageTensor& img) const = 0;
};

/// Differentiable scalar function of an embedding.
class EmbeddingLoss {
public:
    virtual ~EmbeddingLoss() = default;
    virtual double value(std::span<const double> embedding) const = 0;
    virtual std::vector<double> grad(std::span<const double> embedding) const = 0;
};

/// Resizes (bilinear) a unit-domain image to the adapter's input size.
ImageTensor prepare_encoder_input(const ImageEncoderAdapter& adapter, const ImageTensor& img);

/// Encode with validation: unit domain required, spatial size adapted, output
/// checked against the adapter contract (declared dim, nonzero norm).
Embedding encode_image(const ImageEncoderAdapter& adapter, const ImageTensor& img);

/// Encode a nonempty string; output checked against the adapter contract.
Embedding encode_text(const TextEncoderAdapter& adapter, const std::string& text);

/// Caption a unit-domain image; the result is checked to be nonempty.
std::string caption(const CaptionPipelineAdapter& adapter, const ImageTensor& img);

/// Gradient of loss_fn(encode(img)) with respect to img. img must already be
/// at the adapter's input size. Throws NonFiniteGradient if any entry is not
/// finite.
std::vector<double> grad_wrt_image(const ImageEncoderAdapter& adapter, const ImageTensor& img,
                                   const EmbeddingLoss& loss_fn);

}  // namespace i2t
