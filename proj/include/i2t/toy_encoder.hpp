#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "i2t/encoders.hpp"

namespace i2t {

/// Small smooth stand-in for a pretrained image encoder: non-overlapping
/// patches -> fixed random linear map -> tanh -> mean pool -> linear map.
/// Weights are a pure function of weight_seed, so embeddings are reproducible
/// across machines. Differentiable everywhere.
class ToyEncoder final : public ImageEncoderAdapter {
public:
    struct Params {
        int patch_size = 4;
        std::uint64_t weight_seed = 7;
        int embedding_dim = 32;
        int input_height = 32;
        int input_width = 32;
        int hidden_dim = 32;
        double gain = 5.0;        // scale of the patch map; controls sensitivity
        double bias_scale = 0.3;
    };

    explicit ToyEncoder(Params params);

    const std::string& encoder_id() const override { return id_; }
    int embedding_dim() const override { return params_.embedding_dim; }
    std::pair<int, int> input_size() const override {
        return {params_.input_height, params_.input_width};
    }
    const Params& params() const { return params_; }

    Embedding encode(const ImageTensor& img) const override;
    std::vector<double> encode_vjp(const ImageTensor& img,
                                   std::span<const double> cotangent) const override;

private:
    void check_input(const ImageTensor& img) const;

    Params params_;
    std::string id_;
    int patch_count_ = 0;
    int patch_len_ = 0;               // 3 * patch_size^2
    std::vector<double> w1_;          // hidden_dim x patch_len
    std::vector<double> b1_;          // hidden_dim
    std::vector<double> w2_;          // embedding_dim x hidden_dim
};

}  // namespace i2t
