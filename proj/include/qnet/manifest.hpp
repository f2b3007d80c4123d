#pragma once

// Run manifests: every command writes manifest.json into its output directory
// before any results, so a run can be reproduced byte for byte from the
// manifest alone.  Manifests carry no timestamps.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qnet {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;          // subcommand name
    nlohmann::json config;        // resolved configuration, defaults included
    std::uint64_t master_seed = 0;
    std::string tool_version = kToolVersion;
    std::vector<std::string> outputs;  // files the run writes, relative to out dir
};

nlohmann::json manifest_to_json(const RunManifest& manifest);

// Writes <out_dir>/manifest.json, creating the directory if needed.
void write_manifest(const std::string& out_dir, const RunManifest& manifest);

}  // namespace qnet
