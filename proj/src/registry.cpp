#include "i2t/registry.hpp"

#include <cstdint>
#include <map>
#include <sstream>

#include "i2t/errors.hpp"
#include "i2t/toy_encoder.hpp"
#include "i2t/toy_multimodal.hpp"

namespace i2t {

namespace {

struct ParsedId {
    std::string kind;
    std::map<std::string, std::string> params;
};

ParsedId parse_id(const std::string& id) {
    ParsedId out;
    const auto colon = id.find(':');
    out.kind = id.substr(0, colon);
    if (colon == std::string::npos) return out;
    std::istringstream rest(id.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ModelLoad, "bad parameter '" + item + "' in id '" + id + "'");
        }
        out.params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

std::int64_t get_int(const ParsedId& p, const std::string& key, std::int64_t fallback) {
    const auto it = p.params.find(key);
    if (it == p.params.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ModelLoad, "parameter " + key + " must be an integer");
    }
}

double get_double(const ParsedId& p, const std::string& key, double fallback) {
    const auto it = p.params.find(key);
    if (it == p.params.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ModelLoad, "parameter " + key + " must be a number");
    }
}

// "32x32" -> (32, 32)
std::pair<int, int> get_size(const ParsedId& p, const std::string& key, std::pair<int, int> fallback) {
    const auto it = p.params.find(key);
    if (it == p.params.end()) return fallback;
    const auto x = it->second.find('x');
    if (x == std::string::npos) {
        throw Error(ErrorCode::ModelLoad, "parameter " + key + " must look like HxW");
    }
    try {
        return {std::stoi(it->second.substr(0, x)), std::stoi(it->second.substr(x + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::ModelLoad, "parameter " + key + " must look like HxW");
    }
}

ToyEncoder::Params toy_encoder_params(const ParsedId& p) {
    ToyEncoder::Params params;
    params.weight_seed = static_cast<std::uint64_t>(get_int(p, "seed", 7));
    params.embedding_dim = static_cast<int>(get_int(p, "dim", 32));
    params.patch_size = static_cast<int>(get_int(p, "patch", 4));
    const auto [h, w] = get_size(p, "size", {32, 32});
    params.input_height = h;
    params.input_width = w;
    params.hidden_dim = static_cast<int>(get_int(p, "hidden", 32));
    params.gain = get_double(p, "gain", 5.0);
    return params;
}

}  // namespace

std::unique_ptr<ImageEncoderAdapter> make_image_encoder(const std::string& encoder_id) {
    const ParsedId p = parse_id(encoder_id);
    if (p.kind == "toy-image") {
        try {
            return std::make_unique<ToyEncoder>(toy_encoder_params(p));
        } catch (const Error& e) {
            throw Error(ErrorCode::ModelLoad, e.what());
        }
    }
    throw Error(ErrorCode::ModelLoad,
                "unknown image encoder id '" + encoder_id +
                    "' (pretrained checkpoints load through the Python adapters)");
}

std::unique_ptr<TextEncoderAdapter> make_text_encoder(const std::string& encoder_id) {
    const ParsedId p = parse_id(encoder_id);
    if (p.kind == "toy-text") {
        return std::make_unique<ToyTextEncoder>(static_cast<std::uint64_t>(get_int(p, "seed", 7)),
                                                static_cast<int>(get_int(p, "dim", 32)));
    }
    throw Error(ErrorCode::ModelLoad, "unknown text encoder id '" + encoder_id + "'");
}

std::unique_ptr<CaptionPipelineAdapter> make_captioner(const std::string& pipeline_id) {
    const ParsedId p = parse_id(pipeline_id);
    if (p.kind == "toy-caption") {
        ToyCaptioner::Params params;
        params.encoder = toy_encoder_params(p);
        params.words = static_cast<int>(get_int(p, "words", 3));
        try {
            return std::make_unique<ToyCaptioner>(params);
        } catch (const Error& e) {
            throw Error(ErrorCode::ModelLoad, e.what());
        }
    }
    throw Error(ErrorCode::ModelLoad, "unknown caption pipeline id '" + pipeline_id + "'");
}

}  // namespace i2t
