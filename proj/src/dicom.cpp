#include "ctstd/dicom.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "ctstd/detail/bytes.hpp"
#include "ctstd/io.hpp"

namespace ctstd::dicom {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

constexpr const char* kExplicitVrLe = "1.2.840.10008.1.2.1";

struct Tag {
  uint16_t group, element;
  bool operator==(const Tag& o) const {
    return group == o.group && element == o.element;
  }
};

bool is_long_vr(const char vr[2]) {
  static const char* long_vrs[] = {"OB", "OW", "OF", "SQ", "UT", "UN"};
  for (const char* v : long_vrs)
    if (vr[0] == v[0] && vr[1] == v[1]) return true;
  return false;
}

struct Element {
  Tag tag;
  char vr[3] = {0, 0, 0};
  uint32_t length = 0;       // 0xFFFFFFFF means undefined
  const uint8_t* value = nullptr;
};

constexpr uint32_t kUndefined = 0xFFFFFFFFu;

void skip_undefined_item(ByteReader& r);

// Skips the items of an undefined-length sequence up to and including the
// sequence delimitation item.
void skip_undefined_sequence(ByteReader& r) {
  for (;;) {
    uint16_t group = r.u16("sequence item tag");
    uint16_t element = r.u16("sequence item tag");
    uint32_t len = r.u32("sequence item length");
    if (group == 0xFFFE && element == 0xE0DD) return;  // sequence delimiter
    if (group != 0xFFFE || element != 0xE000)
      throw FormatError("malformed sequence item");
    if (len == kUndefined)
      skip_undefined_item(r);
    else
      r.skip(len, "sequence item");
  }
}

Element read_element(ByteReader& r);

void skip_undefined_item(ByteReader& r) {
  for (;;) {
    // peek for the item delimitation item
    r.require(8, "item content");
    ByteReader peek = r;
    uint16_t group = peek.u16("tag");
    uint16_t element = peek.u16("tag");
    if (group == 0xFFFE && element == 0xE00D) {
      r.skip(8, "item delimiter");
      return;
    }
    (void)read_element(r);  // nested element; sequences recurse
  }
}

Element read_element(ByteReader& r) {
  Element e;
  e.tag.group = r.u16("tag");
  e.tag.element = r.u16("tag");
  const uint8_t* vr = r.bytes(2, "VR");
  e.vr[0] = char(vr[0]);
  e.vr[1] = char(vr[1]);
  if (is_long_vr(e.vr)) {
    r.skip(2, "VR reserved bytes");
    e.length = r.u32("value length");
  } else {
    e.length = r.u16("value length");
  }
  if (e.length == kUndefined) {
    if (std::strncmp(e.vr, "SQ", 2) != 0 && std::strncmp(e.vr, "UN", 2) != 0)
      throw FormatError("undefined length on non-sequence element");
    skip_undefined_sequence(r);
    return e;
  }
  if (e.length % 2 != 0) throw FormatError("odd element value length");
  e.value = r.bytes(e.length, "element value");
  return e;
}

std::string value_string(const Element& e) {
  std::string s(reinterpret_cast<const char*>(e.value), e.length);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
  return s;
}

float value_decimal(const Element& e, const char* what) {
  std::string s = value_string(e);
  try {
    size_t used = 0;
    float v = std::stof(s, &used);
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("bad decimal string in ") + what);
  }
}

uint16_t value_u16(const Element& e, const char* what) {
  if (e.length < 2) throw FormatError(std::string("short US value in ") + what);
  return uint16_t(e.value[0]) | uint16_t(e.value[1]) << 8;
}

}  // namespace

std::pair<CtSliceMeta, Tensor> parse_dicom(const uint8_t* data, size_t len) {
  ByteReader r(data, len);
  r.skip(128, "preamble");
  const uint8_t* magic = r.bytes(4, "DICM marker");
  if (std::memcmp(magic, "DICM", 4) != 0)
    throw FormatError("missing DICM marker");

  // File meta group (0002,xxxx) is always Explicit VR LE.
  std::string transfer_syntax;
  while (!r.eof()) {
    r.require(4, "tag");
    ByteReader peek = r;
    uint16_t group = peek.u16("tag");
    if (group != 0x0002) break;
    Element e = read_element(r);
    if (e.tag == Tag{0x0002, 0x0010}) transfer_syntax = value_string(e);
  }
  if (transfer_syntax.empty())
    throw FormatError("missing transfer syntax UID");
  if (transfer_syntax != kExplicitVrLe)
    throw UnsupportedError("unsupported transfer syntax: " + transfer_syntax);

  CtSliceMeta meta;
  const uint8_t* pixel_data = nullptr;
  uint32_t pixel_len = 0;
  while (!r.eof()) {
    Element e = read_element(r);
    if (e.tag == Tag{0x0028, 0x0010}) meta.rows = value_u16(e, "Rows");
    else if (e.tag == Tag{0x0028, 0x0011}) meta.cols = value_u16(e, "Columns");
    else if (e.tag == Tag{0x0028, 0x0100})
      meta.bits_allocated = value_u16(e, "BitsAllocated");
    else if (e.tag == Tag{0x0028, 0x0103})
      meta.pixel_representation = value_u16(e, "PixelRepresentation");
    else if (e.tag == Tag{0x0028, 0x1052})
      meta.rescale_intercept = value_decimal(e, "RescaleIntercept");
    else if (e.tag == Tag{0x0028, 0x1053})
      meta.rescale_slope = value_decimal(e, "RescaleSlope");
    else if (e.tag == Tag{0x0018, 0x0050})
      meta.slice_thickness = value_decimal(e, "SliceThickness");
    else if (e.tag == Tag{0x0018, 0x1210})
      meta.convolution_kernel = value_string(e);
    else if (e.tag == Tag{0x7FE0, 0x0010}) {
      if (e.length == kUndefined)
        throw UnsupportedError("encapsulated pixel data is not supported");
      pixel_data = e.value;
      pixel_len = e.length;
    }
  }

  if (!pixel_data) throw FormatError("missing PixelData (7FE0,0010)");
  if (meta.rows == 0 || meta.cols == 0)
    throw FormatError("missing or zero Rows/Columns");
  if (meta.bits_allocated != 8 && meta.bits_allocated != 16)
    throw UnsupportedError("BitsAllocated must be 8 or 16");
  if (meta.pixel_representation != 0 && meta.pixel_representation != 1)
    throw FormatError("invalid PixelRepresentation");

  size_t n = size_t(meta.rows) * meta.cols;
  size_t bytes_per = meta.bits_allocated / 8;
  if (pixel_len < n * bytes_per)
    throw FormatError("PixelData shorter than Rows*Columns");

  Tensor img({meta.rows, meta.cols}, Unit::HU);
  for (size_t i = 0; i < n; ++i) {
    int32_t stored;
    if (meta.bits_allocated == 8) {
      stored = meta.pixel_representation
                   ? int32_t(int8_t(pixel_data[i]))
                   : int32_t(pixel_data[i]);
    } else {
      uint16_t raw = uint16_t(pixel_data[2 * i]) |
                     uint16_t(pixel_data[2 * i + 1]) << 8;
      stored = meta.pixel_representation ? int32_t(int16_t(raw)) : int32_t(raw);
    }
    img.data[i] = float(stored) * meta.rescale_slope + meta.rescale_intercept;
  }
  img.require_finite("parse_dicom");
  return {meta, std::move(img)};
}

std::pair<CtSliceMeta, Tensor> parse_dicom_file(const std::string& path) {
  std::vector<uint8_t> buf = read_file(path);
  return parse_dicom(buf.data(), buf.size());
}

namespace {

void put_element(ByteWriter& w, uint16_t group, uint16_t element,
                 const char vr[2], const std::vector<uint8_t>& value) {
  if (value.size() % 2 != 0 || value.size() > kUndefined - 1)
    throw ValidationError("element value must have even length");
  w.u16(group);
  w.u16(element);
  w.u8(uint8_t(vr[0]));
  w.u8(uint8_t(vr[1]));
  char v2[2] = {vr[0], vr[1]};
  if (is_long_vr(v2)) {
    w.u16(0);
    w.u32(uint32_t(value.size()));
  } else {
    if (value.size() > 0xffff) throw ValidationError("value too long for VR");
    w.u16(uint16_t(value.size()));
  }
  w.bytes(value.data(), value.size());
}

std::vector<uint8_t> str_value(std::string s, char pad = ' ') {
  if (s.size() % 2 != 0) s.push_back(pad);
  return std::vector<uint8_t>(s.begin(), s.end());
}

std::vector<uint8_t> u16_value(uint16_t v) {
  return {uint8_t(v), uint8_t(v >> 8)};
}

std::string format_decimal(float v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", double(v));
  return buf;
}

}  // namespace

std::vector<uint8_t> write_minimal_dicom(const CtSliceMeta& meta,
                                         const Tensor& img) {
  if (!img.is_2d()) throw ShapeError("DICOM writer expects a 2-D image");
  if (meta.rows == 0 || meta.cols == 0)
    throw ValidationError("rows and cols must be positive");
  if (img.rows() != meta.rows || img.cols() != meta.cols)
    throw ValidationError("image shape does not match metadata");
  if (meta.bits_allocated != 8 && meta.bits_allocated != 16)
    throw ValidationError("BitsAllocated must be 8 or 16");
  if (meta.rescale_slope == 0.0f)
    throw ValidationError("rescale slope must be nonzero");
  img.require_finite("write_minimal_dicom");

  // inverse rescale with range check
  int64_t lo, hi;
  if (meta.pixel_representation) {
    lo = -(int64_t(1) << (meta.bits_allocated - 1));
    hi = (int64_t(1) << (meta.bits_allocated - 1)) - 1;
  } else {
    lo = 0;
    hi = (int64_t(1) << meta.bits_allocated) - 1;
  }
  size_t n = img.data.size();
  std::vector<int32_t> stored(n);
  for (size_t i = 0; i < n; ++i) {
    double s = std::round((double(img.data[i]) - meta.rescale_intercept) /
                          meta.rescale_slope);
    if (!(s >= double(lo) && s <= double(hi)))
      throw ValidationError("stored pixel value out of range");
    stored[i] = int32_t(s);
  }

  // file meta group
  ByteWriter metaw;
  put_element(metaw, 0x0002, 0x0001, "OB", {0x00, 0x01});
  put_element(metaw, 0x0002, 0x0002, "UI",
              str_value("1.2.840.10008.5.1.4.1.1.2", '\0'));  // CT Image Storage
  put_element(metaw, 0x0002, 0x0003, "UI",
              str_value("1.2.826.0.1.3680043.9.7433.1.1", '\0'));
  put_element(metaw, 0x0002, 0x0010, "UI", str_value(kExplicitVrLe, '\0'));

  ByteWriter w;
  std::vector<uint8_t> preamble(128, 0);
  w.bytes(preamble.data(), preamble.size());
  w.bytes("DICM", 4);
  put_element(w, 0x0002, 0x0000, "UL",
              {uint8_t(metaw.buf.size()), uint8_t(metaw.buf.size() >> 8),
               uint8_t(metaw.buf.size() >> 16), uint8_t(metaw.buf.size() >> 24)});
  w.bytes(metaw.buf.data(), metaw.buf.size());

  if (meta.slice_thickness)
    put_element(w, 0x0018, 0x0050, "DS",
                str_value(format_decimal(*meta.slice_thickness)));
  if (meta.convolution_kernel)
    put_element(w, 0x0018, 0x1210, "SH", str_value(*meta.convolution_kernel));
  put_element(w, 0x0028, 0x0002, "US", u16_value(1));  // SamplesPerPixel
  put_element(w, 0x0028, 0x0010, "US", u16_value(uint16_t(meta.rows)));
  put_element(w, 0x0028, 0x0011, "US", u16_value(uint16_t(meta.cols)));
  put_element(w, 0x0028, 0x0100, "US", u16_value(uint16_t(meta.bits_allocated)));
  put_element(w, 0x0028, 0x0101, "US", u16_value(uint16_t(meta.bits_allocated)));
  put_element(w, 0x0028, 0x0102, "US", u16_value(uint16_t(meta.bits_allocated - 1)));
  put_element(w, 0x0028, 0x0103, "US",
              u16_value(uint16_t(meta.pixel_representation)));
  put_element(w, 0x0028, 0x1052, "DS",
              str_value(format_decimal(meta.rescale_intercept)));
  put_element(w, 0x0028, 0x1053, "DS",
              str_value(format_decimal(meta.rescale_slope)));

  std::vector<uint8_t> px;
  if (meta.bits_allocated == 8) {
    px.resize(n % 2 ? n + 1 : n, 0);
    for (size_t i = 0; i < n; ++i) px[i] = uint8_t(stored[i] & 0xff);
    put_element(w, 0x7FE0, 0x0010, "OB", px);
  } else {
    px.resize(2 * n);
    for (size_t i = 0; i < n; ++i) {
      uint16_t raw = uint16_t(stored[i] & 0xffff);
      px[2 * i] = uint8_t(raw);
      px[2 * i + 1] = uint8_t(raw >> 8);
    }
    put_element(w, 0x7FE0, 0x0010, "OW", px);
  }
  return std::move(w.buf);
}

}  // namespace ctstd::dicom
