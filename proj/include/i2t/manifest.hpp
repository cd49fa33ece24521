#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "i2t/config.hpp"

namespace i2t {

/// Everything needed to reproduce one attack run directory.
struct RunManifest {
    AttackConfig config;
    std::vector<std::string> input_paths;
    std::string output_dir;
    std::string encoder_id;
    std::string timestamp;
    std::string git_or_version_tag;

    bool operator==(const RunManifest&) const = default;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

std::string serialize_manifest(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace i2t
