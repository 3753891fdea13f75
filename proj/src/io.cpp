#include "ctstd/io.hpp"

#include <zlib.h>

#include <cfenv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ctstd/detail/bytes.hpp"
#include "ctstd/sha256.hpp"

namespace ctstd {

using detail::ByteReader;
using detail::ByteWriter;

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open file for reading: " + path);
  f.seekg(0, std::ios::end);
  std::streamoff n = f.tellg();
  f.seekg(0);
  std::vector<uint8_t> buf(static_cast<size_t>(n));
  if (n > 0) f.read(reinterpret_cast<char*>(buf.data()), n);
  if (!f) throw Error("read failed: " + path);
  return buf;
}

void write_file(const std::string& path, const void* data, size_t len) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open file for writing: " + path);
  f.write(static_cast<const char*>(data), std::streamsize(len));
  if (!f) throw Error("write failed: " + path);
}

// ---- CTTN ----

void encode_tensor(const Tensor& t, std::vector<uint8_t>& out) {
  if (t.shape.empty()) throw ValidationError("tensor has no shape");
  if (t.shape.size() > 16) throw ValidationError("tensor rank > 16");
  if (Tensor::element_count(t.shape) != t.data.size())
    throw ValidationError("tensor shape does not match payload size");
  t.require_finite("save_tensor");

  ByteWriter w;
  w.bytes("CTTN", 4);
  w.u32(kTensorFormatVersion);
  w.u8(uint8_t(t.shape.size()));
  for (uint32_t d : t.shape) w.u32(d);
  w.u8(uint8_t(t.unit));
  for (float v : t.data) w.f32(v);
  out.insert(out.end(), w.buf.begin(), w.buf.end());
}

Tensor decode_tensor(const uint8_t* data, size_t len, size_t& consumed) {
  ByteReader r(data, len);
  const uint8_t* magic = r.bytes(4, "magic");
  if (std::memcmp(magic, "CTTN", 4) != 0)
    throw FormatError("bad tensor magic");
  uint32_t version = r.u32("version");
  if (version != kTensorFormatVersion)
    throw FormatError("unsupported tensor format version");
  uint8_t ndim = r.u8("ndim");
  if (ndim == 0 || ndim > 16) throw FormatError("invalid tensor rank");
  Tensor t;
  t.shape.resize(ndim);
  for (int i = 0; i < ndim; ++i) {
    t.shape[i] = r.u32("dims");
    if (t.shape[i] == 0) throw FormatError("zero dimension");
  }
  uint8_t unit = r.u8("unit");
  if (unit > 2) throw FormatError("invalid unit code");
  t.unit = Unit(unit);
  size_t n = Tensor::element_count(t.shape);
  const uint8_t* payload = r.bytes(4 * n, "payload");
  t.data.resize(n);
  for (size_t i = 0; i < n; ++i)
    t.data[i] = detail::f32_from_le(payload + 4 * i);
  if (!t.all_finite()) throw ValidationError("tensor payload has non-finite values");
  consumed = r.pos();
  return t;
}

void save_tensor(const Tensor& t, const std::string& path) {
  std::vector<uint8_t> buf;
  encode_tensor(t, buf);
  write_file(path, buf.data(), buf.size());
}

Tensor load_tensor(const std::string& path) {
  std::vector<uint8_t> buf = read_file(path);
  size_t consumed = 0;
  Tensor t = decode_tensor(buf.data(), buf.size(), consumed);
  if (consumed != buf.size())
    throw FormatError("trailing bytes after tensor payload: " + path);
  return t;
}

// ---- Checkpoint ----

namespace {
void validate_name(const std::string& name) {
  if (name.empty()) throw ValidationError("checkpoint entry name is empty");
  for (char ch : name)
    if (uint8_t(ch) > 127)
      throw ValidationError("checkpoint entry name is not ASCII: " + name);
}
}  // namespace

void Checkpoint::add(const std::string& name, Tensor t) {
  validate_name(name);
  if (find(name)) throw ValidationError("duplicate checkpoint entry: " + name);
  entries.emplace_back(name, std::move(t));
}

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : entries)
    if (n == name) return &t;
  return nullptr;
}

const Tensor& Checkpoint::require(const std::string& name) const {
  const Tensor* t = find(name);
  if (!t) throw ValidationError("missing checkpoint entry: " + name);
  return *t;
}

bool Checkpoint::has_prefix(const std::string& prefix) const {
  for (const auto& [n, t] : entries)
    if (n.rfind(prefix, 0) == 0) return true;
  return false;
}

std::string Checkpoint::digest(const std::string& prefix) const {
  ByteWriter w;
  for (const auto& [name, t] : entries) {
    if (!prefix.empty() && name.rfind(prefix, 0) != 0) continue;
    w.bytes(name.data(), name.size());
    w.u8(0);
    w.u8(uint8_t(t.shape.size()));
    for (uint32_t d : t.shape) w.u32(d);
    for (float v : t.data) w.f32(v);
  }
  return sha256_hex(w.buf.data(), w.buf.size());
}

std::vector<uint8_t> encode_checkpoint(const Checkpoint& c) {
  ByteWriter w;
  w.bytes("CTCK", 4);
  w.u32(c.version);
  w.u32(uint32_t(c.entries.size()));
  for (const auto& [name, t] : c.entries) {
    validate_name(name);
    if (name.size() > 0xffff) throw ValidationError("entry name too long");
    w.u16(uint16_t(name.size()));
    w.bytes(name.data(), name.size());
    std::vector<uint8_t> rec;
    encode_tensor(t, rec);
    w.bytes(rec.data(), rec.size());
  }
  return std::move(w.buf);
}

Checkpoint decode_checkpoint(const uint8_t* data, size_t len) {
  ByteReader r(data, len);
  const uint8_t* magic = r.bytes(4, "magic");
  if (std::memcmp(magic, "CTCK", 4) != 0)
    throw FormatError("bad checkpoint magic");
  Checkpoint c;
  c.version = r.u32("version");
  uint32_t count = r.u32("entry count");
  for (uint32_t i = 0; i < count; ++i) {
    uint16_t name_len = r.u16("name length");
    const uint8_t* nb = r.bytes(name_len, "name");
    std::string name(reinterpret_cast<const char*>(nb), name_len);
    size_t consumed = 0;
    Tensor t = decode_tensor(data + r.pos(), len - r.pos(), consumed);
    r.skip(consumed, "tensor record");
    c.add(name, std::move(t));  // add() rejects duplicates
  }
  if (!r.eof()) throw FormatError("trailing bytes after checkpoint entries");
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::vector<uint8_t> buf = encode_checkpoint(c);
  write_file(path, buf.data(), buf.size());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::vector<uint8_t> buf = read_file(path);
  return decode_checkpoint(buf.data(), buf.size());
}

// ---- windowing / PNG ----

std::vector<uint8_t> window_to_bytes(const Tensor& t, const WindowLevel& w) {
  if (!t.is_2d()) throw ShapeError("render expects a 2-D tensor");
  std::vector<uint8_t> px(t.data.size());
  const float span = w.hi - w.lo;
  for (size_t i = 0; i < t.data.size(); ++i) {
    float u = (t.data[i] - w.lo) / span;
    u = u < 0.0f ? 0.0f : (u > 1.0f ? 1.0f : u);
    // nearbyint under the default FE_TONEAREST mode = round half to even
    px[i] = uint8_t(std::nearbyintf(u * 255.0f));
  }
  return px;
}

namespace {
void put_chunk(std::vector<uint8_t>& out, const char tag[4],
               const uint8_t* data, size_t len) {
  auto be32 = [&out](uint32_t v) {
    out.push_back(uint8_t(v >> 24));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
  };
  be32(uint32_t(len));
  size_t body_start = out.size();
  out.insert(out.end(), tag, tag + 4);
  if (len) out.insert(out.end(), data, data + len);
  uint32_t crc = uint32_t(
      ::crc32(0, out.data() + body_start, uInt(out.size() - body_start)));
  be32(crc);
}
}  // namespace

void write_gray_png(const uint8_t* pixels, uint32_t width, uint32_t height,
                    const std::string& path) {
  if (width == 0 || height == 0) throw ValidationError("empty image");
  std::vector<uint8_t> png;
  static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  png.insert(png.end(), sig, sig + 8);

  uint8_t ihdr[13];
  auto be32_at = [&](int off, uint32_t v) {
    ihdr[off] = uint8_t(v >> 24);
    ihdr[off + 1] = uint8_t(v >> 16);
    ihdr[off + 2] = uint8_t(v >> 8);
    ihdr[off + 3] = uint8_t(v);
  };
  be32_at(0, width);
  be32_at(4, height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // no interlace
  put_chunk(png, "IHDR", ihdr, 13);

  // scanlines with filter byte 0
  std::vector<uint8_t> raw((size_t(width) + 1) * height);
  for (uint32_t y = 0; y < height; ++y) {
    raw[size_t(y) * (width + 1)] = 0;
    std::memcpy(raw.data() + size_t(y) * (width + 1) + 1,
                pixels + size_t(y) * width, width);
  }
  uLongf zlen = ::compressBound(uLong(raw.size()));
  std::vector<uint8_t> z(zlen);
  if (::compress2(z.data(), &zlen, raw.data(), uLong(raw.size()), 6) != Z_OK)
    throw Error("deflate failed");
  put_chunk(png, "IDAT", z.data(), zlen);
  put_chunk(png, "IEND", nullptr, 0);
  write_file(path, png.data(), png.size());
}

void render_png(const Tensor& t, const WindowLevel& w, const std::string& path) {
  std::vector<uint8_t> px = window_to_bytes(t, w);
  write_gray_png(px.data(), t.cols(), t.rows(), path);
}

}  // namespace ctstd
