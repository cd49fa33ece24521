#include "i2t/toy_encoder.hpp"

#include <cmath>
#include <sstream>

#include "i2t/errors.hpp"
#include "i2t/rng.hpp"

namespace i2t {

ToyEncoder::ToyEncoder(Params params) : params_(params) {
    if (params_.patch_size < 1 || params_.embedding_dim < 1 || params_.hidden_dim < 1) {
        throw Error(ErrorCode::InvalidArgument, "toy encoder sizes must be positive");
    }
    if (params_.input_height % params_.patch_size != 0 ||
        params_.input_width % params_.patch_size != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "toy encoder input size must be divisible by the patch size");
    }
    patch_len_ = 3 * params_.patch_size * params_.patch_size;
    patch_count_ = (params_.input_height / params_.patch_size) *
                   (params_.input_width / params_.patch_size);

    std::ostringstream id;
    id << "toy-image:seed=" << params_.weight_seed << ",dim=" << params_.embedding_dim
       << ",patch=" << params_.patch_size << ",size=" << params_.input_height << "x"
       << params_.input_width;
    id_ = id.str();

    SeededRng rng(params_.weight_seed);
    w1_.resize(static_cast<std::size_t>(params_.hidden_dim) * patch_len_);
    const double w1_std = params_.gain / std::sqrt(static_cast<double>(patch_len_));
    for (double& w : w1_) w = rng.normal(0.0, w1_std);
    b1_.resize(params_.hidden_dim);
    for (double& b : b1_) b = rng.normal(0.0, params_.bias_scale);
    w2_.resize(static_cast<std::size_t>(params_.embedding_dim) * params_.hidden_dim);
    const double w2_std = 1.0 / std::sqrt(static_cast<double>(params_.hidden_dim));
    for (double& w : w2_) w = rng.normal(0.0, w2_std);
}

void ToyEncoder::check_input(const ImageTensor& img) const {
    if (img.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::DomainMismatch, "toy encoder expects unit-domain input");
    }
    if (img.height() != params_.input_height || img.width() != params_.input_width) {
        throw Error(ErrorCode::ShapeMismatch,
                    "toy encoder expects " + std::to_string(params_.input_height) + "x" +
                        std::to_string(params_.input_width) + " input");
    }
}

Embedding ToyEncoder::encode(const ImageTensor& img) const {
    check_input(img);
    const int p = params_.patch_size;
    const int hd = params_.hidden_dim;

    std::vector<double> pooled(hd, 0.0);
    std::vector<double> patch(patch_len_);
    for (int py = 0; py < params_.input_height; py += p) {
        for (int px = 0; px < params_.input_width; px += p) {
            int k = 0;
            for (int y = py; y < py + p; ++y) {
                for (int x = px; x < px + p; ++x) {
                    for (int c = 0; c < 3; ++c) patch[k++] = img.at(y, x, c) - 0.5;
                }
            }
            for (int h = 0; h < hd; ++h) {
                const double* row = &w1_[static_cast<std::size_t>(h) * patch_len_];
                double pre = b1_[h];
                for (int j = 0; j < patch_len_; ++j) pre += row[j] * patch[j];
                pooled[h] += std::tanh(pre);
            }
        }
    }
    for (double& v : pooled) v /= patch_count_;

    Embedding e;
    e.source = EmbeddingSource::ImageEncoder;
    e.values.resize(params_.embedding_dim);
    for (int d = 0; d < params_.embedding_dim; ++d) {
        const double* row = &w2_[static_cast<std::size_t>(d) * hd];
        double s = 0.0;
        for (int h = 0; h < hd; ++h) s += row[h] * pooled[h];
        e.values[d] = s;
    }
    return e;
}

std::vector<double> ToyEncoder::encode_vjp(const ImageTensor& img,
                                           std::span<const double> cotangent) const {
    check_input(img);
    if (cotangent.size() != static_cast<std::size_t>(params_.embedding_dim)) {
        throw Error(ErrorCode::ShapeMismatch, "cotangent size must equal the embedding dim");
    }
    const int p = params_.patch_size;
    const int hd = params_.hidden_dim;

    // d<e, g>/d pooled = W2^T g, shared across patches.
    std::vector<double> dpooled(hd, 0.0);
    for (int d = 0; d < params_.embedding_dim; ++d) {
        const double* row = &w2_[static_cast<std::size_t>(d) * hd];
        for (int h = 0; h < hd; ++h) dpooled[h] += cotangent[d] * row[h];
    }
    for (double& v : dpooled) v /= patch_count_;

    std::vector<double> grad(img.size(), 0.0);
    std::vector<double> patch(patch_len_);
    for (int py = 0; py < params_.input_height; py += p) {
        for (int px = 0; px < params_.input_width; px += p) {
            int k = 0;
            for (int y = py; y < py + p; ++y) {
                for (int x = px; x < px + p; ++x) {
                    for (int c = 0; c < 3; ++c) patch[k++] = img.at(y, x, c) - 0.5;
                }
            }
            for (int h = 0; h < hd; ++h) {
                const double* row = &w1_[static_cast<std::size_t>(h) * patch_len_];
                double pre = b1_[h];
                for (int j = 0; j < patch_len_; ++j) pre += row[j] * patch[j];
                const double t = std::tanh(pre);
                const double dpre = dpooled[h] * (1.0 - t * t);
                int j = 0;
                for (int y = py; y < py + p; ++y) {
                    for (int x = px; x < px + p; ++x) {
                        for (int c = 0; c < 3; ++c) {
                            grad[static_cast<std::size_t>((y * params_.input_width + x) * 3 + c)] +=
                                dpre * row[j++];
                        }
                    }
                }
            }
        }
    }
    return grad;
}

}  // namespace i2t
