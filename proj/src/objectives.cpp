#include "i2t/objectives.hpp"

#include <cmath>

#include "i2t/errors.hpp"

namespace i2t {

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

void check_same_dim(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "vector sizes differ: " + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
    }
}

void check_same_image_shape(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b) || a.domain() != b.domain()) {
        throw Error(ErrorCode::ShapeMismatch, "images differ in shape or domain");
    }
}

}  // namespace

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    check_same_dim(u, v);
    const double nu = norm2(u);
    const double nv = norm2(v);
    if (nu < kZeroNormTolerance || nv < kZeroNormTolerance) {
        throw Error(ErrorCode::ZeroNorm, "cosine similarity of a (near-)zero vector");
    }
    return dot(u, v) / (nu * nv);
}

double cosine_similarity(const Embedding& u, const Embedding& v) {
    return cosine_similarity(std::span<const double>(u.values), std::span<const double>(v.values));
}

std::vector<double> cosine_similarity_grad_v(std::span<const double> u,
                                             std::span<const double> v) {
    check_same_dim(u, v);
    const double nu = norm2(u);
    const double nv = norm2(v);
    if (nu < kZeroNormTolerance || nv < kZeroNormTolerance) {
        throw Error(ErrorCode::ZeroNorm, "cosine gradient of a (near-)zero vector");
    }
    const double cs = dot(u, v) / (nu * nv);
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        g[i] = u[i] / (nu * nv) - cs * v[i] / (nv * nv);
    }
    return g;
}

double untargeted_cs_loss(const ObjectiveSpec& spec, const Embedding& adv_embedding) {
    return cosine_similarity(spec.reference_embedding, adv_embedding);
}

double targeted_cs_loss(const ObjectiveSpec& spec, const Embedding& adv_embedding) {
    return 1.0 - cosine_similarity(spec.reference_embedding, adv_embedding);
}

double cs_loss(const ObjectiveSpec& spec, const Embedding& adv_embedding) {
    return spec.mode == AttackMode::Untargeted ? untargeted_cs_loss(spec, adv_embedding)
                                               : targeted_cs_loss(spec, adv_embedding);
}

std::vector<double> cs_loss_grad(const ObjectiveSpec& spec, std::span<const double> adv_embedding) {
    std::vector<double> g = cosine_similarity_grad_v(spec.reference_embedding.values, adv_embedding);
    if (spec.mode == AttackMode::Targeted) {
        for (double& x : g) x = -x;
    }
    return g;
}

double sim_loss(const ImageTensor& clean, const ImageTensor& adv) {
    check_same_image_shape(clean, adv);
    double s = 0.0;
    auto c = clean.values();
    auto a = adv.values();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = c[i] - a[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<double> sim_loss_grad_adv(const ImageTensor& clean, const ImageTensor& adv) {
    check_same_image_shape(clean, adv);
    const double n = sim_loss(clean, adv);
    std::vector<double> g(adv.size(), 0.0);
    if (n < kZeroNormTolerance) return g;  // subgradient at the identical-image point
    auto c = clean.values();
    auto a = adv.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = (a[i] - c[i]) / n;
    return g;
}

double total_loss(const ObjectiveSpec& spec, const ImageTensor& adv, const Embedding& adv_embedding) {
    return total_loss_terms(spec, adv, adv_embedding).total;
}

LossBreakdown total_loss_terms(const ObjectiveSpec& spec, const ImageTensor& adv,
                               const Embedding& adv_embedding) {
    LossBreakdown b;
    b.cs_term = cs_loss(spec, adv_embedding);
    b.sim_term = sim_loss(spec.clean_image, adv);
    b.total = b.cs_term + spec.lam * b.sim_term;
    return b;
}

double CsObjectiveLoss::value(std::span<const double> embedding) const {
    const double cs = cosine_similarity(std::span<const double>(spec_->reference_embedding.values),
                                        embedding);
    return spec_->mode == AttackMode::Untargeted ? cs : 1.0 - cs;
}

std::vector<double> CsObjectiveLoss::grad(std::span<const double> embedding) const {
    return cs_loss_grad(*spec_, embedding);
}

TotalGrad total_loss_grad(const ObjectiveSpec& spec, const ImageTensor& adv,
                          const ImageEncoderAdapter& encoder) {
    const Embedding e = encoder.encode(adv);
    TotalGrad out;
    out.terms = total_loss_terms(spec, adv, e);
    const std::vector<double> ge = cs_loss_grad(spec, e.values);
    out.grad = encoder.encode_vjp(adv, ge);
    if (spec.lam != 0.0) {
        const std::vector<double> gs = sim_loss_grad_adv(spec.clean_image, adv);
        for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += spec.lam * gs[i];
    }
    return out;
}

}  // namespace i2t
