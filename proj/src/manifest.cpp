#include "qnet/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "qnet/graph.hpp"

namespace qnet {

nlohmann::json manifest_to_json(const RunManifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["config"] = manifest.config;
    j["master_seed"] = manifest.master_seed;
    j["tool_version"] = manifest.tool_version;
    j["outputs"] = manifest.outputs;
    return j;
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path = std::filesystem::path(out_dir) / "manifest.json";
    std::ofstream out(path);
    if (!out) throw GraphIoError(path.string() + ": cannot open for writing");
    out << manifest_to_json(manifest).dump(2) << '\n';
    if (!out) throw GraphIoError(path.string() + ": write failed");
}

}  // namespace qnet
