#pragma once

#include <span>
#include <vector>

#include "i2t/config.hpp"
#include "i2t/embedding.hpp"
#include "i2t/encoders.hpp"
#include "i2t/image.hpp"

namespace i2t {

/// Norm below which an embedding counts as zero for cosine purposes.
inline constexpr double kZeroNormTolerance = 1e-12;

/// u.v / (|u||v|), in [-1, 1] up to rounding. Throws ZeroNorm if either
/// argument has norm below kZeroNormTolerance.
double cosine_similarity(std::span<const double> u, std::span<const double> v);
double cosine_similarity(const Embedding& u, const Embedding& v);

/// d cosine_similarity(u, v) / d v, with u held fixed.
std::vector<double> cosine_similarity_grad_v(std::span<const double> u,
                                             std::span<const double> v);

/// Binds the fixed quantities of one attack objective: the frozen reference
/// embedding (clean-image embedding when untargeted, target-image embedding
/// when targeted) and the clean image for the similarity term.
struct ObjectiveSpec {
    AttackMode mode = AttackMode::Untargeted;
    double lam = 0.1;
    Embedding reference_embedding;
    ImageTensor clean_image;
};

/// Cosine similarity between the reference and the adversarial embedding;
/// minimizing drives the embeddings apart.
double untargeted_cs_loss(const ObjectiveSpec& spec, const Embedding& adv_embedding);

/// 1 - cosine similarity to the target embedding; 0 iff positively collinear.
double targeted_cs_loss(const ObjectiveSpec& spec, const Embedding& adv_embedding);

/// Mode-dispatched embedding loss and its gradient w.r.t. the adversarial embedding.
double cs_loss(const ObjectiveSpec& spec, const Embedding& adv_embedding);
std::vector<double> cs_loss_grad(const ObjectiveSpec& spec, std::span<const double> adv_embedding);

/// Euclidean norm of the flattened pixel difference (no averaging).
double sim_loss(const ImageTensor& clean, const ImageTensor& adv);

/// d sim_loss / d adv. Zero (subgradient) when the images coincide.
std::vector<double> sim_loss_grad_adv(const ImageTensor& clean, const ImageTensor& adv);

struct LossBreakdown {
    double total = 0.0;
    double cs_term = 0.0;
    double sim_term = 0.0;  // unscaled sim_loss value
};

/// cs_loss + lam * sim_loss. The epsilon constraint is enforced by projection
/// in the attack engine, not by this value.
double total_loss(const ObjectiveSpec& spec, const ImageTensor& adv, const Embedding& adv_embedding);
LossBreakdown total_loss_terms(const ObjectiveSpec& spec, const ImageTensor& adv,
                               const Embedding& adv_embedding);

/// EmbeddingLoss view of the objective's embedding-dependent part, for
/// grad_wrt_image and the finite-difference harness.
class CsObjectiveLoss final : public EmbeddingLoss {
public:
    explicit CsObjectiveLoss(const ObjectiveSpec& spec) : spec_(&spec) {}
    double value(std::span<const double> embedding) const override;
    std::vector<double> grad(std::span<const double> embedding) const override;

private:
    const ObjectiveSpec* spec_;
};

struct TotalGrad {
    LossBreakdown terms;
    std::vector<double> grad;  // d total / d adv image, image layout
};

/// Value and gradient of the full objective through one encoder forward.
/// adv must be unit-domain at the encoder's input size.
TotalGrad total_loss_grad(const ObjectiveSpec& spec, const ImageTensor& adv,
                          const ImageEncoderAdapter& encoder);

}  // namespace i2t
