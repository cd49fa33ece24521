#include "i2t/cache.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "i2t/errors.hpp"

namespace i2t {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out(len * 2, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0x0f];
    }
    return out;
}

std::string sha256_hex(const std::string& text) {
    return sha256_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string image_content_hash(const ImageTensor& img) {
    std::vector<std::uint8_t> bytes;
    const std::string header =
        "RGB8:" + std::to_string(img.height()) + "x" + std::to_string(img.width()) + ":";
    bytes.insert(bytes.end(), header.begin(), header.end());
    const std::vector<std::uint8_t> rgb = to_rgb8(img);
    bytes.insert(bytes.end(), rgb.begin(), rgb.end());
    return sha256_hex(bytes);
}

std::string image_unit_hash(const ImageTensor& img) {
    if (img.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::DomainMismatch, "image_unit_hash expects a unit-domain image");
    }
    std::vector<std::uint8_t> bytes;
    const std::string header =
        "F64:" + std::to_string(img.height()) + "x" + std::to_string(img.width()) + ":";
    bytes.insert(bytes.end(), header.begin(), header.end());
    auto vals = img.values();
    bytes.resize(header.size() + vals.size() * sizeof(double));
    std::memcpy(bytes.data() + header.size(), vals.data(), vals.size() * sizeof(double));
    return sha256_hex(bytes);
}

KeyValueCache::KeyValueCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path KeyValueCache::entry_path(const std::string& model_id,
                                                const std::string& content_hash) const {
    return dir_ / (sha256_hex(model_id + "\n" + content_hash) + ".json");
}

std::optional<std::string> KeyValueCache::get(const std::string& model_id,
                                              const std::string& content_hash) const {
    const auto path = entry_path(model_id, content_hash);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void KeyValueCache::put(const std::string& model_id, const std::string& content_hash,
                        const std::string& value) {
    const auto path = entry_path(model_id, content_hash);
    // Unique temp name per writer; rename is atomic within the directory.
    const auto tmp = path.string() + "." + std::to_string(::getpid()) + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write cache entry " + tmp);
        out << value;
    }
    std::filesystem::rename(tmp, path);
}

namespace {

nlohmann::json parse_entry(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("corrupt ") + what + " cache entry: " + e.what());
    }
}

}  // namespace

std::optional<Embedding> EmbeddingCache::get(const std::string& encoder_id,
                                             const std::string& image_hash) const {
    auto raw = store_.get(encoder_id, image_hash);
    if (!raw) return std::nullopt;
    const nlohmann::json j = parse_entry(*raw, "embedding");
    Embedding e;
    j.at("values").get_to(e.values);
    e.source = j.at("source").get<std::string>() == "text_encoder" ? EmbeddingSource::TextEncoder
                                                                   : EmbeddingSource::ImageEncoder;
    return e;
}

void EmbeddingCache::put(const std::string& encoder_id, const std::string& image_hash,
                         const Embedding& e) {
    nlohmann::json j{{"encoder_id", encoder_id},
                     {"image_sha256", image_hash},
                     {"source", embedding_source_name(e.source)},
                     {"values", e.values}};
    store_.put(encoder_id, image_hash, j.dump());
}

std::optional<std::string> CaptionCache::get(const std::string& pipeline_id,
                                             const std::string& image_hash) const {
    auto raw = store_.get(pipeline_id, image_hash);
    if (!raw) return std::nullopt;
    return parse_entry(*raw, "caption").at("caption").get<std::string>();
}

void CaptionCache::put(const std::string& pipeline_id, const std::string& image_hash,
                       const std::string& caption) {
    nlohmann::json j{{"pipeline_id", pipeline_id}, {"image_sha256", image_hash}, {"caption", caption}};
    store_.put(pipeline_id, image_hash, j.dump());
}

}  // namespace i2t
