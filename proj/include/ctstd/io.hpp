#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctstd/tensor.hpp"

namespace ctstd {

// CTTN tensor file: magic "CTTN", version u32, ndim u8, dims u32 each,
// unit u8, payload float32. Everything little-endian; round-trips bitwise.
constexpr uint32_t kTensorFormatVersion = 1;

void save_tensor(const Tensor& t, const std::string& path);
Tensor load_tensor(const std::string& path);

// In-memory encode/decode of the same layout (used by the checkpoint format).
void encode_tensor(const Tensor& t, std::vector<uint8_t>& out);
Tensor decode_tensor(const uint8_t* data, size_t len, size_t& consumed);

/// Ordered named-tensor store for trained network parameters.
/// CTCK file: magic "CTCK", version u32, entry count u32, then per entry
/// name length u16, name bytes, and the tensor as a full CTTN record.
struct Checkpoint {
  std::vector<std::pair<std::string, Tensor>> entries;
  uint32_t version = 1;

  void add(const std::string& name, Tensor t);
  const Tensor* find(const std::string& name) const;
  const Tensor& require(const std::string& name) const;
  bool has_prefix(const std::string& prefix) const;

  /// SHA-256 over names and payloads of entries whose name starts with
  /// `prefix` (all entries when empty). Used by the stage-isolation check.
  std::string digest(const std::string& prefix = "") const;
};

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::vector<uint8_t> encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(const uint8_t* data, size_t len);

// ---- visualization ----

/// Windowed 8-bit view of a 2-D tensor: clamp((v-lo)/(hi-lo),0,1)*255,
/// rounded half-to-even. Row-major, one byte per pixel.
std::vector<uint8_t> window_to_bytes(const Tensor& t, const WindowLevel& w);

/// 8-bit grayscale PNG of the windowed tensor.
void render_png(const Tensor& t, const WindowLevel& w, const std::string& path);

/// Minimal PNG container writer (grayscale 8-bit, zlib-compressed).
void write_gray_png(const uint8_t* pixels, uint32_t width, uint32_t height,
                    const std::string& path);

// ---- helpers shared by the binary readers ----

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const void* data, size_t len);

}  // namespace ctstd
