#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "ctstd/errors.hpp"

namespace ctstd::detail {

// Bounds-checked little-endian reader; every read is validated so that
// truncated input surfaces as FormatError instead of UB.
class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t len) : data_(data), len_(len) {}

  size_t pos() const { return pos_; }
  size_t remaining() const { return len_ - pos_; }
  bool eof() const { return pos_ >= len_; }

  void require(size_t n, const char* what) const {
    if (len_ - pos_ < n)
      throw FormatError(std::string("truncated input reading ") + what);
  }

  uint8_t u8(const char* what) {
    require(1, what);
    return data_[pos_++];
  }
  uint16_t u16(const char* what) {
    require(2, what);
    uint16_t v = uint16_t(data_[pos_]) | uint16_t(data_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }
  uint32_t u32(const char* what) {
    require(4, what);
    uint32_t v = uint32_t(data_[pos_]) | uint32_t(data_[pos_ + 1]) << 8 |
                 uint32_t(data_[pos_ + 2]) << 16 | uint32_t(data_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
  }
  const uint8_t* bytes(size_t n, const char* what) {
    require(n, what);
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  void skip(size_t n, const char* what) {
    require(n, what);
    pos_ += n;
  }

 private:
  const uint8_t* data_;
  size_t len_;
  size_t pos_ = 0;
};

class ByteWriter {
 public:
  std::vector<uint8_t> buf;

  void u8(uint8_t v) { buf.push_back(v); }
  void u16(uint16_t v) {
    buf.push_back(uint8_t(v));
    buf.push_back(uint8_t(v >> 8));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(uint8_t(v >> (8 * i)));
  }
  void bytes(const void* p, size_t n) {
    const uint8_t* b = static_cast<const uint8_t*>(p);
    buf.insert(buf.end(), b, b + n);
  }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
};

inline float f32_from_le(const uint8_t* p) {
  uint32_t bits = uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
                  uint32_t(p[3]) << 24;
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace ctstd::detail
