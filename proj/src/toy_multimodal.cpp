#include "i2t/toy_multimodal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "i2t/errors.hpp"
#include "i2t/rng.hpp"

namespace i2t {

namespace {

// Fixed word list; the seeded vectors, not the words, carry the semantics.
const char* kWords[] = {
    "river", "dog",    "snow",  "tree",   "cat",    "road",   "house", "boat",
    "field", "horse",  "table", "flower", "window", "beach",  "bird",  "cloud",
    "stone", "bridge", "lamp",  "fence",  "train",  "garden", "hill",  "market",
};

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

ToyVocabulary::ToyVocabulary(std::uint64_t seed, int dim_) : dim(dim_) {
    if (dim < 2) throw Error(ErrorCode::InvalidArgument, "toy vocabulary needs dim >= 2");
    SeededRng rng(seed ^ 0x746f79766f636162ull);  // decorrelate from encoder weights
    for (const char* w : kWords) {
        std::vector<double> v(dim);
        double norm = 0.0;
        for (double& x : v) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        words.emplace_back(w);
        vectors.push_back(std::move(v));
    }
}

ToyTextEncoder::ToyTextEncoder(std::uint64_t seed, int dim) : vocab_(seed, dim) {
    std::ostringstream id;
    id << "toy-text:seed=" << seed << ",dim=" << dim;
    id_ = id.str();
}

Embedding ToyTextEncoder::encode(const std::string& text) const {
    Embedding e;
    e.source = EmbeddingSource::TextEncoder;
    e.values.assign(vocab_.dim, 0.0);
    for (const std::string& token : tokenize(text)) {
        const auto it = std::find(vocab_.words.begin(), vocab_.words.end(), token);
        if (it != vocab_.words.end()) {
            const auto& v = vocab_.vectors[static_cast<std::size_t>(it - vocab_.words.begin())];
            for (int i = 0; i < vocab_.dim; ++i) e.values[i] += v[i];
        } else {
            // Small deterministic contribution so unknown-only text still embeds.
            SeededRng rng(fnv1a(token));
            for (int i = 0; i < vocab_.dim; ++i) e.values[i] += 0.05 * rng.normal();
        }
    }
    double norm = 0.0;
    for (double v : e.values) norm += v * v;
    if (norm == 0.0) {
        // No alphabetic tokens at all; map to a fixed direction.
        e.values[0] = 1e-3;
    }
    return e;
}

ToyCaptioner::ToyCaptioner(Params params)
    : params_(params),
      encoder_(params.encoder),
      vocab_(params.encoder.weight_seed, params.encoder.embedding_dim) {
    if (params_.words < 1 || params_.words > static_cast<int>(vocab_.words.size())) {
        throw Error(ErrorCode::InvalidArgument, "toy captioner word count out of range");
    }
    std::ostringstream id;
    id << "toy-caption:seed=" << params_.encoder.weight_seed
       << ",dim=" << params_.encoder.embedding_dim << ",patch=" << params_.encoder.patch_size
       << ",size=" << params_.encoder.input_height << "x" << params_.encoder.input_width
       << ",words=" << params_.words;
    id_ = id.str();
}

std::string ToyCaptioner::caption(const ImageTensor& img) const {
    const Embedding e = encode_image(encoder_, img);
    double norm = 0.0;
    for (double v : e.values) norm += v * v;
    norm = std::sqrt(norm);

    // Greedy decode: highest-scoring vocabulary words first.
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(vocab_.words.size());
    for (std::size_t i = 0; i < vocab_.words.size(); ++i) {
        double dot = 0.0;
        for (int d = 0; d < vocab_.dim; ++d) dot += e.values[d] * vocab_.vectors[i][d];
        scored.emplace_back(dot / norm, i);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::ostringstream text;
    text << "a photo of";
    for (int k = 0; k < params_.words; ++k) text << " " << vocab_.words[scored[k].second];
    return text.str();
}

}  // namespace i2t
