#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <zlib.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ctstd/io.hpp"
#include "ctstd/rng.hpp"
#include "ctstd/sha256.hpp"
#include "test_util.hpp"

using namespace ctstd;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ctstd_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};
}  // namespace

TEST_CASE("tensor round trip and exact file size") {
  TempDir tmp;
  Tensor t({2, 2}, Unit::HU);
  t.data = {0, 1, 2, 3};
  std::string p = tmp.file("t.cttn");
  save_tensor(t, p);
  CHECK(fs::file_size(p) == 4 + 4 + 1 + 8 + 1 + 16);
  Tensor back = load_tensor(p);
  CHECK(back == t);
}

TEST_CASE("non-finite values rejected on save") {
  TempDir tmp;
  Tensor t({1});
  t.data = {std::nanf("")};
  CHECK_THROWS_AS(save_tensor(t, tmp.file("bad.cttn")), ValidationError);
  t.data = {std::numeric_limits<float>::infinity()};
  CHECK_THROWS_AS(save_tensor(t, tmp.file("bad.cttn")), ValidationError);
}

TEST_CASE("truncated payload raises FormatError") {
  TempDir tmp;
  Tensor t({3});
  t.data = {1, 2, 3};
  std::string p = tmp.file("t.cttn");
  save_tensor(t, p);
  auto bytes = read_file(p);
  // keep only 2 of the 3 payload floats
  bytes.resize(bytes.size() - 4);
  write_file(p, bytes.data(), bytes.size());
  CHECK_THROWS_AS(load_tensor(p), FormatError);
}

TEST_CASE("bad magic raises FormatError") {
  TempDir tmp;
  Tensor t({2});
  t.data = {1, 2};
  std::string p = tmp.file("t.cttn");
  save_tensor(t, p);
  auto bytes = read_file(p);
  bytes[0] = 'X';
  write_file(p, bytes.data(), bytes.size());
  CHECK_THROWS_AS(load_tensor(p), FormatError);
}

TEST_CASE("round trip property over random shapes") {
  TempDir tmp;
  Rng rng(77);
  for (int rep = 0; rep < 25; ++rep) {
    int ndim = 1 + int(rng.below(4));
    std::vector<uint32_t> shape;
    for (int i = 0; i < ndim; ++i) shape.push_back(1 + rng.below(7));
    Tensor t(shape, Unit(rng.below(3)));
    for (float& v : t.data) v = float(rng.normal(0.0, 100.0));
    std::string p = tmp.file("rt.cttn");
    save_tensor(t, p);
    CHECK(load_tensor(p) == t);
  }
}

TEST_CASE("checkpoint round trip preserves order") {
  TempDir tmp;
  Checkpoint c;
  SUBCASE("empty") {
    std::string p = tmp.file("empty.ctck");
    save_checkpoint(c, p);
    Checkpoint back = load_checkpoint(p);
    CHECK(back.entries.empty());
    CHECK(back.version == c.version);
  }
  SUBCASE("two entries") {
    Tensor w({2, 3});
    w.data = {1, 2, 3, 4, 5, 6};
    Tensor b({3});
    b.data = {-1, 0, 1};
    c.add("enc.w1", w);
    c.add("enc.b1", b);
    std::string p = tmp.file("two.ctck");
    save_checkpoint(c, p);
    Checkpoint back = load_checkpoint(p);
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].first == "enc.w1");
    CHECK(back.entries[1].first == "enc.b1");
    CHECK(back.entries[0].second == w);
    CHECK(back.entries[1].second == b);
    // byte-identical re-encode
    CHECK(encode_checkpoint(back) == encode_checkpoint(c));
  }
}

TEST_CASE("checkpoint rejects duplicates and bad magic") {
  Checkpoint c;
  Tensor t({1});
  t.data = {0};
  c.add("a", t);
  CHECK_THROWS_AS(c.add("a", t), ValidationError);
  CHECK_THROWS_AS(c.add("", t), ValidationError);

  auto bytes = encode_checkpoint(c);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bytes.data(), bytes.size()), FormatError);
}

TEST_CASE("checkpoint digest is prefix-scoped and content-sensitive") {
  Checkpoint c;
  Tensor t({2});
  t.data = {1, 2};
  c.add("enc.w", t);
  c.add("den.w", t);
  std::string all = c.digest();
  std::string enc = c.digest("enc.");
  Checkpoint c2 = c;
  c2.entries[1].second.data[0] = 99;  // mutate den.w
  CHECK(c.digest("enc.") == c2.digest("enc."));
  CHECK(c.digest() != c2.digest());
  CHECK(all != enc);
}

TEST_CASE("windowing hits documented pixel values") {
  WindowLevel w(-800, 600);
  Tensor t = testutil::make2d({{-800, 600}, {-100, -1000}});
  auto px = window_to_bytes(t, w);
  CHECK(px[0] == 0);
  CHECK(px[1] == 255);
  CHECK(px[2] == 128);  // (−100+800)/1400 = 0.5 -> 127.5 -> even -> 128
  CHECK(px[3] == 0);    // clamped below lo
}

TEST_CASE("windowing is monotone") {
  WindowLevel w(-800, 600);
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    float a = float(rng.uniform(-1200, 900));
    float b = float(rng.uniform(-1200, 900));
    if (a > b) std::swap(a, b);
    Tensor t = testutil::make2d({{a, b}});
    auto px = window_to_bytes(t, w);
    CHECK(px[0] <= px[1]);
  }
}

TEST_CASE("window requires 2-D input") {
  Tensor t({2, 2, 2});
  CHECK_THROWS_AS(window_to_bytes(t, WindowLevel(0, 1)), ShapeError);
}

TEST_CASE("png writer emits a valid deterministic grayscale file") {
  TempDir tmp;
  Tensor t = testutil::random2d(9, 13, 42, -1000.0f, 600.0f, Unit::HU);
  WindowLevel w(-800, 600);
  std::string p1 = tmp.file("a.png"), p2 = tmp.file("b.png");
  render_png(t, w, p1);
  render_png(t, w, p2);
  auto f1 = read_file(p1), f2 = read_file(p2);
  CHECK(f1 == f2);

  // signature
  const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  REQUIRE(f1.size() > 8);
  CHECK(std::equal(sig, sig + 8, f1.begin()));

  // walk chunks, verify CRCs, find IHDR dims and IDAT payload
  size_t pos = 8;
  uint32_t width = 0, height = 0;
  std::vector<uint8_t> idat;
  auto be32 = [&](size_t at) {
    return uint32_t(f1[at]) << 24 | uint32_t(f1[at + 1]) << 16 |
           uint32_t(f1[at + 2]) << 8 | uint32_t(f1[at + 3]);
  };
  while (pos + 12 <= f1.size()) {
    uint32_t len = be32(pos);
    std::string tag(f1.begin() + pos + 4, f1.begin() + pos + 8);
    uint32_t stored_crc = be32(pos + 8 + len);
    uint32_t crc = uint32_t(::crc32(0, f1.data() + pos + 4, len + 4));
    CHECK(stored_crc == crc);
    if (tag == "IHDR") {
      width = be32(pos + 8);
      height = be32(pos + 12);
      CHECK(f1[pos + 16] == 8);  // bit depth
      CHECK(f1[pos + 17] == 0);  // grayscale
    } else if (tag == "IDAT") {
      idat.insert(idat.end(), f1.begin() + pos + 8, f1.begin() + pos + 8 + len);
    }
    pos += 12 + len;
  }
  CHECK(width == 13);
  CHECK(height == 9);

  // inflate and compare to the windowed pixels
  auto px = window_to_bytes(t, w);
  std::vector<uint8_t> raw((size_t(width) + 1) * height);
  uLongf rawlen = uLongf(raw.size());
  REQUIRE(::uncompress(raw.data(), &rawlen, idat.data(), uLong(idat.size())) == Z_OK);
  REQUIRE(rawlen == raw.size());
  for (uint32_t y = 0; y < height; ++y) {
    CHECK(raw[size_t(y) * (width + 1)] == 0);  // filter byte
    for (uint32_t x = 0; x < width; ++x)
      CHECK(raw[size_t(y) * (width + 1) + 1 + x] == px[size_t(y) * width + x]);
  }
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("", 0) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const char* abc = "abc";
  CHECK(sha256_hex(abc, 3) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
