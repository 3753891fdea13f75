#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>

#include "ctstd/dicom.hpp"
#include "ctstd/rng.hpp"
#include "test_util.hpp"

using namespace ctstd;
using namespace ctstd::dicom;

namespace {
CtSliceMeta basic_meta(uint32_t rows, uint32_t cols) {
  CtSliceMeta m;
  m.rows = rows;
  m.cols = cols;
  m.bits_allocated = 16;
  m.pixel_representation = 0;
  m.rescale_slope = 1.0f;
  m.rescale_intercept = -1024.0f;
  return m;
}
}  // namespace

TEST_CASE("2x2 slice with rescale round-trips through the golden writer") {
  CtSliceMeta m = basic_meta(2, 2);
  m.slice_thickness = 1.0f;
  m.convolution_kernel = "Bl64";
  Tensor img = testutil::make2d({{0, 0}, {100, -100}});
  auto bytes = write_minimal_dicom(m, img);

  auto [meta, parsed] = parse_dicom(bytes.data(), bytes.size());
  CHECK(meta.rows == 2);
  CHECK(meta.cols == 2);
  CHECK(meta.rescale_slope == 1.0f);
  CHECK(meta.rescale_intercept == -1024.0f);
  CHECK(meta.slice_thickness.value() == doctest::Approx(1.0));
  CHECK(meta.convolution_kernel.value() == "Bl64");
  CHECK(parsed.unit == Unit::HU);
  // stored values are 1024,1024,1124,924 -> HU via stored*slope+intercept
  CHECK(parsed.data[0] == 0.0f);
  CHECK(parsed.data[1] == 0.0f);
  CHECK(parsed.data[2] == 100.0f);
  CHECK(parsed.data[3] == -100.0f);
}

TEST_CASE("missing DICM marker raises FormatError") {
  CtSliceMeta m = basic_meta(1, 1);
  Tensor img = testutil::make2d({{0}});
  auto bytes = write_minimal_dicom(m, img);
  bytes[128] = 'X';
  CHECK_THROWS_AS(parse_dicom(bytes.data(), bytes.size()), FormatError);
}

TEST_CASE("linear rescale slope 2") {
  CtSliceMeta m = basic_meta(1, 1);
  m.rescale_slope = 2.0f;
  m.rescale_intercept = 0.0f;
  Tensor img = testutil::make2d({{10}});  // stored = 5
  auto bytes = write_minimal_dicom(m, img);
  auto [meta, parsed] = parse_dicom(bytes.data(), bytes.size());
  CHECK(parsed.data[0] == 10.0f);
  CHECK(meta.rescale_slope == 2.0f);
}

TEST_CASE("signed 16-bit two's complement decode") {
  CtSliceMeta m = basic_meta(1, 1);
  m.pixel_representation = 1;
  m.rescale_slope = 1.0f;
  m.rescale_intercept = 0.0f;
  Tensor img = testutil::make2d({{-5}});
  auto bytes = write_minimal_dicom(m, img);
  auto [meta, parsed] = parse_dicom(bytes.data(), bytes.size());
  CHECK(meta.pixel_representation == 1);
  CHECK(parsed.data[0] == -5.0f);
}

TEST_CASE("writer validation") {
  Tensor img = testutil::make2d({{0}});
  SUBCASE("rows=0") {
    CtSliceMeta m = basic_meta(0, 1);
    CHECK_THROWS_AS(write_minimal_dicom(m, img), ValidationError);
  }
  SUBCASE("out-of-range stored value") {
    CtSliceMeta m = basic_meta(1, 1);
    m.bits_allocated = 8;
    m.rescale_slope = 1.0f;
    m.rescale_intercept = 0.0f;
    Tensor big = testutil::make2d({{300}});
    CHECK_THROWS_AS(write_minimal_dicom(m, big), ValidationError);
  }
  SUBCASE("shape mismatch") {
    CtSliceMeta m = basic_meta(2, 2);
    CHECK_THROWS_AS(write_minimal_dicom(m, img), ValidationError);
  }
}

TEST_CASE("unsupported transfer syntax") {
  CtSliceMeta m = basic_meta(1, 1);
  Tensor img = testutil::make2d({{0}});
  auto bytes = write_minimal_dicom(m, img);
  // patch the transfer syntax UID to Explicit VR Big Endian (same length)
  const char* from = "1.2.840.10008.1.2.1";
  const char* to = "1.2.840.10008.1.2.2";
  auto it = std::search(bytes.begin(), bytes.end(), from, from + 19);
  REQUIRE(it != bytes.end());
  std::copy(to, to + 19, it);
  CHECK_THROWS_AS(parse_dicom(bytes.data(), bytes.size()), UnsupportedError);
}

TEST_CASE("round trip property over random slices") {
  Rng rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    CtSliceMeta m;
    m.rows = 1 + rng.below(6);
    m.cols = 1 + rng.below(6);
    m.bits_allocated = rng.below(2) ? 8 : 16;
    m.pixel_representation = int(rng.below(2));
    m.rescale_slope = 1.0f;
    m.rescale_intercept = m.bits_allocated == 16 ? -1024.0f : 0.0f;
    int64_t lo, hi;
    if (m.pixel_representation) {
      lo = -(int64_t(1) << (m.bits_allocated - 1));
      hi = (int64_t(1) << (m.bits_allocated - 1)) - 1;
    } else {
      lo = 0;
      hi = (int64_t(1) << m.bits_allocated) - 1;
    }
    Tensor img({m.rows, m.cols}, Unit::HU);
    for (float& v : img.data) {
      int64_t stored = lo + int64_t(rng.uniform() * double(hi - lo));
      v = float(stored) * m.rescale_slope + m.rescale_intercept;
    }
    auto bytes = write_minimal_dicom(m, img);
    auto [meta, parsed] = parse_dicom(bytes.data(), bytes.size());
    CHECK(meta.rows == m.rows);
    CHECK(meta.cols == m.cols);
    CHECK(meta.bits_allocated == m.bits_allocated);
    CHECK(meta.pixel_representation == m.pixel_representation);
    REQUIRE(parsed.data.size() == img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i)
      CHECK(parsed.data[i] == img.data[i]);
  }
}

TEST_CASE("fuzzed truncation never crashes the parser") {
  CtSliceMeta m = basic_meta(3, 3);
  m.slice_thickness = 1.5f;
  m.convolution_kernel = "Br40";
  Tensor img({3, 3}, Unit::HU);
  for (size_t i = 0; i < 9; ++i) img.data[i] = float(i) * 10.0f - 1000.0f;
  auto bytes = write_minimal_dicom(m, img);

  // every strict prefix must fail cleanly with a typed error
  for (size_t len = 0; len < bytes.size(); ++len) {
    CHECK_THROWS_AS(parse_dicom(bytes.data(), len), Error);
  }
  // random corruption of single bytes must never crash
  Rng rng(123);
  for (int rep = 0; rep < 200; ++rep) {
    auto fuzz = bytes;
    size_t at = size_t(rng.uniform() * double(fuzz.size()));
    fuzz[at] = uint8_t(rng.below(256));
    try {
      parse_dicom(fuzz.data(), fuzz.size());
    } catch (const Error&) {
      // typed failures are fine; crashes and foreign exceptions are not
    }
  }
}
