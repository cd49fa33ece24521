#include "i2t/manifest.hpp"

#include <fstream>
#include <sstream>

#include "i2t/errors.hpp"

namespace i2t {

void to_json(nlohmann::json& j, const RunManifest& m) {
    j = nlohmann::json{{"config", m.config},
                       {"input_paths", m.input_paths},
                       {"output_dir", m.output_dir},
                       {"encoder_id", m.encoder_id},
                       {"timestamp", m.timestamp},
                       {"git_or_version_tag", m.git_or_version_tag}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
    j.at("config").get_to(m.config);
    j.at("input_paths").get_to(m.input_paths);
    j.at("output_dir").get_to(m.output_dir);
    j.at("encoder_id").get_to(m.encoder_id);
    j.at("timestamp").get_to(m.timestamp);
    j.at("git_or_version_tag").get_to(m.git_or_version_tag);
}

std::string serialize_manifest(const RunManifest& m) {
    return nlohmann::json(m).dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<RunManifest>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad manifest: ") + e.what());
    }
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << serialize_manifest(m);
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

}  // namespace i2t
