#pragma once

#include <cstdint>
#include <string>

namespace cbamgrid {

// SHA-256 of a byte string, hex-encoded. Used for run-manifest digests.
std::string sha256_hex(const std::string& data);

// Digest of a file's bytes. Raises Io if the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace cbamgrid
