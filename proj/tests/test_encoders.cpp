#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "i2t/cache.hpp"
#include "i2t/encoders.hpp"
#include "i2t/errors.hpp"
#include "i2t/objectives.hpp"
#include "i2t/toy_encoder.hpp"
#include "i2t/toy_multimodal.hpp"
#include "support.hpp"

using namespace i2t;
using i2t::testing::random_unit_image;

namespace {

ToyEncoder::Params small_params(std::uint64_t seed = 7) {
    ToyEncoder::Params p;
    p.patch_size = 4;
    p.weight_seed = seed;
    p.embedding_dim = 12;
    p.input_height = 16;
    p.input_width = 16;
    p.hidden_dim = 24;
    return p;
}

}  // namespace

TEST_CASE("toy encoder is deterministic and seed-dependent") {
    const ToyEncoder enc(small_params());
    const ImageTensor zeros(16, 16, PixelDomain::Unit, 0.0);
    const Embedding a = enc.encode(zeros);
    const Embedding b = enc.encode(zeros);
    CHECK(a.values == b.values);  // bitwise stable
    CHECK(a.dim() == 12);
    CHECK(a.source == EmbeddingSource::ImageEncoder);

    const ToyEncoder enc2(small_params(8));
    CHECK(enc2.encode(zeros).values != a.values);

    // Weights are a pure function of the seed: a second instance agrees bitwise.
    const ToyEncoder enc3(small_params());
    CHECK(enc3.encode(zeros).values == a.values);
}

TEST_CASE("toy encoder local smoothness") {
    const ToyEncoder enc(small_params());
    const ImageTensor x = random_unit_image(16, 16, 5);
    ImageTensor nudged = x;
    for (std::size_t i = 0; i < nudged.size(); ++i) {
        nudged.values()[i] += (i % 2 == 0 ? 1e-6 : -1e-6);
    }
    const Embedding ex = enc.encode(x);
    const Embedding en = enc.encode(nudged);
    double max_diff = 0.0;
    for (int i = 0; i < ex.dim(); ++i) {
        max_diff = std::max(max_diff, std::abs(ex.values[i] - en.values[i]));
    }
    // Finite-difference style bound: the toy map has modest Lipschitz constant.
    CHECK(max_diff > 0.0);
    CHECK(max_diff < 1e-3);
}

TEST_CASE("encode_image validates domain, resizes, and checks the contract") {
    const ToyEncoder enc(small_params());
    const ImageTensor byte_img(16, 16, PixelDomain::Byte, 10.0);
    CHECK_THROWS_AS(encode_image(enc, byte_img), Error);

    // A differently sized image is resized to the adapter input size.
    const ImageTensor big = random_unit_image(33, 20, 9);
    const Embedding e = encode_image(enc, big);
    CHECK(e.dim() == enc.embedding_dim());

    const ImageTensor exact = random_unit_image(16, 16, 10);
    CHECK(encode_image(enc, exact).values == enc.encode(exact).values);
}

namespace {

class BrokenEncoder final : public ImageEncoderAdapter {
public:
    const std::string& encoder_id() const override { return id_; }
    int embedding_dim() const override { return 4; }
    std::pair<int, int> input_size() const override { return {8, 8}; }
    Embedding encode(const ImageTensor&) const override {
        return {{0.0, 0.0, 0.0, 0.0}, EmbeddingSource::ImageEncoder};
    }
    std::vector<double> encode_vjp(const ImageTensor& img,
                                   std::span<const double>) const override {
        return std::vector<double>(img.size(), 0.0);
    }

private:
    std::string id_ = "broken";
};

}  // namespace

TEST_CASE("all-zero embeddings violate the encoder contract") {
    const BrokenEncoder enc;
    CHECK_THROWS_AS(encode_image(enc, ImageTensor(8, 8, PixelDomain::Unit, 0.5)), Error);
}

TEST_CASE("grad_wrt_image: constant loss has zero gradient") {
    class ConstantLoss final : public EmbeddingLoss {
    public:
        double value(std::span<const double>) const override { return 3.5; }
        std::vector<double> grad(std::span<const double> e) const override {
            return std::vector<double>(e.size(), 0.0);
        }
    };
    const ToyEncoder enc(small_params());
    const auto g = grad_wrt_image(enc, random_unit_image(16, 16, 3), ConstantLoss{});
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("grad_wrt_image matches central finite differences for a cs loss") {
    const ToyEncoder enc(small_params());
    const ImageTensor ref_img = random_unit_image(16, 16, 100);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.reference_embedding = enc.encode(ref_img);
    spec.clean_image = ref_img;
    const CsObjectiveLoss loss(spec);

    const ImageTensor x = random_unit_image(16, 16, 101);
    const auto analytic = grad_wrt_image(enc, x, loss);
    const auto fd = i2t::testing::finite_difference_grad(
        x, [&](const ImageTensor& img) { return loss.value(enc.encode(img).values); }, 1e-4);
    CHECK(i2t::testing::relative_grad_error(analytic, fd) <= 1e-4);
}

TEST_CASE("grad_wrt_image requires encoder resolution") {
    const ToyEncoder enc(small_params());
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.reference_embedding = enc.encode(random_unit_image(16, 16, 1));
    spec.clean_image = random_unit_image(16, 16, 1);
    const CsObjectiveLoss loss(spec);
    CHECK_THROWS_AS(grad_wrt_image(enc, random_unit_image(8, 8, 2), loss), Error);
}

TEST_CASE("toy text encoder determinism and self-similarity") {
    const ToyTextEncoder text(7, 32);
    const Embedding a = encode_text(text, "a man riding a bike");
    const Embedding b = encode_text(text, "a man riding a bike");
    CHECK(a.values == b.values);
    CHECK(a.source == EmbeddingSource::TextEncoder);
    CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
    CHECK_THROWS_AS(encode_text(text, ""), Error);

    // Different sentences embed differently.
    const Embedding c = encode_text(text, "snow covers the garden fence");
    CHECK(cosine_similarity(a, c) < 0.999);
}

TEST_CASE("toy captioner is deterministic and grounded in its vocabulary") {
    ToyCaptioner::Params params;
    params.encoder = small_params();
    params.encoder.embedding_dim = 32;
    const ToyCaptioner captioner(params);
    const ImageTensor img = random_unit_image(16, 16, 55);
    const std::string c1 = caption(captioner, img);
    const std::string c2 = caption(captioner, img);
    CHECK(c1 == c2);
    CHECK(!c1.empty());
    CHECK(c1.rfind("a photo of ", 0) == 0);
    CHECK(captioner.decoding().kind == Decoding::Kind::Greedy);
}

TEST_CASE("embedding cache round trip and miss") {
    i2t::testing::TempDir dir("ecache");
    EmbeddingCache cache(dir.path());
    const std::string hash = sha256_hex(std::string("image-bytes"));
    CHECK(!cache.get("enc-a", hash).has_value());
    Embedding e{{0.25, -1.5, 3.0}, EmbeddingSource::ImageEncoder};
    cache.put("enc-a", hash, e);
    const auto back = cache.get("enc-a", hash);
    REQUIRE(back.has_value());
    CHECK(back->values == e.values);
    // Distinct encoder ids address distinct entries.
    CHECK(!cache.get("enc-b", hash).has_value());
}

TEST_CASE("caption cache round trip") {
    i2t::testing::TempDir dir("ccache");
    CaptionCache cache(dir.path());
    const ImageTensor img = random_unit_image(8, 8, 77);
    const std::string hash = image_content_hash(img);
    CHECK(!cache.get("cap-a", hash).has_value());
    cache.put("cap-a", hash, "a photo of snow");
    CHECK(cache.get("cap-a", hash) == std::string("a photo of snow"));
}

TEST_CASE("image content hash tracks pixel content") {
    const ImageTensor a = random_unit_image(8, 8, 1);
    ImageTensor b = a;
    CHECK(image_content_hash(a) == image_content_hash(b));
    b.values()[0] = b.values()[0] < 0.5 ? 1.0 : 0.0;
    CHECK(image_content_hash(a) != image_content_hash(b));
}
