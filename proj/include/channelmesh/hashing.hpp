#pragma once
// Content digests for run manifests.

#include <string>

namespace channelmesh {

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace channelmesh
