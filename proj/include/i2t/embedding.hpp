#pragma once

#include <cstddef>
#include <vector>

namespace i2t {

enum class EmbeddingSource { ImageEncoder, TextEncoder };

const char* embedding_source_name(EmbeddingSource s);

/// Fixed-length real vector produced by an encoder.
struct Embedding {
    std::vector<double> values;
    EmbeddingSource source = EmbeddingSource::ImageEncoder;

    int dim() const noexcept { return static_cast<int>(values.size()); }

    bool operator==(const Embedding&) const = default;
};

}  // namespace i2t
