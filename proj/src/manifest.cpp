#include "cbamgrid/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/sha256.hpp"

namespace cbamgrid {

void RunManifest::add_input(const std::string& path) {
    inputs.emplace_back(std::filesystem::path(path).filename().string(), sha256_file(path));
}

void RunManifest::add_artifact(const std::string& path) {
    require(std::filesystem::exists(path), ErrorKind::Io,
            "manifest references missing artifact '" + path + "'");
    artifacts.emplace_back(std::filesystem::path(path).filename().string(), sha256_file(path));
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["seed"] = seed;
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [p, d] : inputs) in[p] = d;
    j["inputs"] = in;
    nlohmann::json art = nlohmann::json::object();
    for (const auto& [p, d] : artifacts) art[p] = d;
    j["artifacts"] = art;
    j["tool_version"] = tool_version;
    j["duration_ms"] = duration_ms;
    return j.dump(2);
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write manifest '" + path + "'");
    out << to_json() << '\n';
}

}  // namespace cbamgrid
