#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "i2t/encoders.hpp"
#include "i2t/toy_encoder.hpp"

namespace i2t {

/// Word list and word vectors shared by the toy text encoder and toy
/// captioner, seeded so the whole toy stack lives in one joint embedding
/// space (the desk-scale analogue of a CLIP-aligned captioner).
struct ToyVocabulary {
    ToyVocabulary(std::uint64_t seed, int dim);

    int dim = 0;
    std::vector<std::string> words;
    std::vector<std::vector<double>> vectors;  // unit vectors, one per word
};

/// Deterministic text encoder: lowercased alphabetic tokens map to vocabulary
/// vectors (unknown tokens to small hash-derived vectors) and are summed.
class ToyTextEncoder final : public TextEncoderAdapter {
public:
    ToyTextEncoder(std::uint64_t seed, int dim);

    const std::string& encoder_id() const override { return id_; }
    int embedding_dim() const override { return vocab_.dim; }
    Embedding encode(const std::string& text) const override;

    const ToyVocabulary& vocabulary() const { return vocab_; }

private:
    ToyVocabulary vocab_;
    std::string id_;
};

/// Deterministic captioner: encodes the image with a ToyEncoder and emits the
/// vocabulary words best aligned with the embedding, greedily.
class ToyCaptioner final : public CaptionPipelineAdapter {
public:
    struct Params {
        ToyEncoder::Params encoder;
        int words = 3;
    };

    explicit ToyCaptioner(Params params);

    const std::string& pipeline_id() const override { return id_; }
    Decoding decoding() const override { return {Decoding::Kind::Greedy, 1}; }
    std::string caption(const ImageTensor& img) const override;

    const ToyEncoder& encoder() const { return encoder_; }

private:
    Params params_;
    ToyEncoder encoder_;
    ToyVocabulary vocab_;
    std::string id_;
};

}  // namespace i2t
