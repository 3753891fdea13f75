#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace ctstd {

/// SHA-256 of a byte buffer, lowercase hex digest.
std::string sha256_hex(const void* data, size_t len);

}  // namespace ctstd
