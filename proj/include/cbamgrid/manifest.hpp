#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cbamgrid {

inline constexpr const char* kToolVersion = "cbamgrid 0.1.0";

// Audit record for one CLI run: input and artifact digests plus the seed.
// `duration_ms` is informational and excluded from reproducibility
// comparisons (everything else is byte-stable for a fixed seed).
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;     // path, sha256
    std::vector<std::pair<std::string, std::string>> artifacts;  // path, sha256
    std::string tool_version = kToolVersion;
    std::int64_t duration_ms = 0;

    void add_input(const std::string& path);
    void add_artifact(const std::string& path);

    std::string to_json() const;
    void write(const std::string& path) const;
};

}  // namespace cbamgrid
