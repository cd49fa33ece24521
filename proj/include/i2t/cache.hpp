#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "i2t/embedding.hpp"
#include "i2t/image.hpp"

namespace i2t {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);

/// Content hash of an image: SHA-256 over the packed RGB8 bytes plus a
/// dimension header, so identical pixel content maps to the same key no
/// matter how the file was encoded.
std::string image_content_hash(const ImageTensor& img);

/// Exact content hash of a unit-domain image (raw double bits). Used for
/// resized model-resolution tensors that do not sit on the byte grid.
std::string image_unit_hash(const ImageTensor& img);

/// Directory-backed content-addressed store keyed by (model id, content
/// hash). Writes go through a temp file plus rename, so concurrent writers
/// for distinct keys never interleave and identical keys are last-write-wins.
class KeyValueCache {
public:
    explicit KeyValueCache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& model_id, const std::string& content_hash) const;
    void put(const std::string& model_id, const std::string& content_hash, const std::string& value);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path entry_path(const std::string& model_id, const std::string& content_hash) const;
    std::filesystem::path dir_;
};

/// Embedding cache for clean-image embeddings during sweeps.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path dir) : store_(std::move(dir)) {}

    std::optional<Embedding> get(const std::string& encoder_id, const std::string& image_hash) const;
    void put(const std::string& encoder_id, const std::string& image_hash, const Embedding& e);

private:
    KeyValueCache store_;
};

/// Predicted-caption cache keyed by (pipeline id, image hash); re-filtering
/// with a new threshold then needs no re-captioning.
class CaptionCache {
public:
    explicit CaptionCache(std::filesystem::path dir) : store_(std::move(dir)) {}

    std::optional<std::string> get(const std::string& pipeline_id, const std::string& image_hash) const;
    void put(const std::string& pipeline_id, const std::string& image_hash, const std::string& caption);

private:
    KeyValueCache store_;
};

}  // namespace i2t
