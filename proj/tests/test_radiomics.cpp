#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "ctstd/radiomics.hpp"
#include "ctstd/rng.hpp"
#include "test_util.hpp"

using namespace ctstd;
using namespace ctstd::radiomics;

namespace {

QuantizerSpec levels_quantizer(int n_levels, float lo, float hi) {
  QuantizerSpec q;
  q.n_levels = n_levels;
  q.mode = QuantizerSpec::Range::FixedHU;
  q.lo = lo;
  q.hi = hi;
  return q;
}

// brute-force pair enumeration oracle for a single GLCM offset
std::vector<double> glcm_oracle(const std::vector<int>& levels, int h, int w,
                                int n, int dy, int dx) {
  std::vector<double> m(size_t(n) * n, 0.0);
  double total = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int sgn = 0; sgn < 2; ++sgn) {
        // symmetric matrix: walk the offset in both directions
        int oy = sgn ? -dy : dy, ox = sgn ? -dx : dx;
        int ny = y + oy, nx = x + ox;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        int a = levels[size_t(y) * w + x], b = levels[size_t(ny) * w + nx];
        if (a < 0 || b < 0) continue;
        m[size_t(a) * n + b] += 1.0;
        total += 1.0;
      }
  if (total > 0)
    for (double& v : m) v /= total;
  return m;
}

// independent run enumeration: walk every maximal run from its start pixel
std::vector<double> glrlm_oracle(const std::vector<int>& levels, int h, int w,
                                 int n, int dy, int dx) {
  int max_run = std::max(h, w);
  std::vector<double> r(size_t(n) * max_run, 0.0);
  std::vector<char> seen(size_t(h) * w, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (seen[size_t(y) * w + x]) continue;
      int l = levels[size_t(y) * w + x];
      if (l < 0) continue;
      // rewind to the start of this run
      int sy = y, sx = x;
      while (true) {
        int py = sy - dy, px = sx - dx;
        if (py < 0 || py >= h || px < 0 || px >= w) break;
        if (levels[size_t(py) * w + px] != l) break;
        sy = py;
        sx = px;
      }
      int len = 0, cy = sy, cx = sx;
      while (cy >= 0 && cy < h && cx >= 0 && cx < w &&
             levels[size_t(cy) * w + cx] == l) {
        seen[size_t(cy) * w + cx] = 1;
        ++len;
        cy += dy;
        cx += dx;
      }
      r[size_t(l) * max_run + len - 1] += 1.0;
    }
  return r;
}

Tensor rot90(const Tensor& t) {
  uint32_t h = t.rows(), w = t.cols();
  Tensor o({w, h}, t.unit);
  for (uint32_t y = 0; y < h; ++y)
    for (uint32_t x = 0; x < w; ++x) o.at(x, h - 1 - y) = t.at(y, x);
  return o;
}

RoiMask rot90(const RoiMask& m) {
  RoiMask o(m.cols, m.rows);
  for (uint32_t y = 0; y < m.rows; ++y)
    for (uint32_t x = 0; x < m.cols; ++x) o.at(x, m.rows - 1 - y) = m.at(y, x);
  return o;
}

Tensor random_levels_image(uint32_t h, uint32_t w, int n_levels, uint64_t seed) {
  Rng rng(seed);
  Tensor t({h, w}, Unit::HU);
  for (float& v : t.data) v = float(rng.below(uint32_t(n_levels)));
  return t;
}

}  // namespace

TEST_CASE("two-level block image: 0-degree symmetric GLCM") {
  // [[0,0],[1,1]]: horizontal neighbors always equal
  Tensor img = testutil::make2d({{0, 0}, {1, 1}});
  RoiMask roi = testutil::full_roi(2, 2);
  auto levels = quantize(img, roi, levels_quantizer(2, 0.0f, 2.0f));
  auto m = glcm_offset(levels, 2, 2, 2, 0, 1);
  CHECK(m[0] == 0.5);  // P(0,0)
  CHECK(m[1] == 0.0);
  CHECK(m[2] == 0.0);
  CHECK(m[3] == 0.5);  // P(1,1)
  double contrast = 0, energy = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      contrast += (i - j) * (i - j) * m[i * 2 + j];
      energy += m[i * 2 + j] * m[i * 2 + j];
    }
  CHECK(contrast == 0.0);
  CHECK(energy == 0.5);
}

TEST_CASE("checkerboard: every horizontal pair differs by one level") {
  Tensor img({8, 8}, Unit::HU);
  for (uint32_t y = 0; y < 8; ++y)
    for (uint32_t x = 0; x < 8; ++x) img.at(y, x) = float((x + y) % 2);
  RoiMask roi = testutil::full_roi(8, 8);
  auto levels = quantize(img, roi, levels_quantizer(2, 0.0f, 2.0f));
  auto m = glcm_offset(levels, 8, 8, 2, 0, 1);
  double contrast = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) contrast += (i - j) * (i - j) * m[i * 2 + j];
  CHECK(contrast == 1.0);
}

TEST_CASE("GLCM and GLRLM match brute-force enumeration on random images") {
  const int offsets[4][2] = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  for (int rep = 0; rep < 50; ++rep) {
    int n_levels = 4;
    Tensor img = random_levels_image(8, 8, n_levels, 1000 + rep);
    // random ROI covering most pixels
    Rng rng(2000 + rep);
    RoiMask roi(8, 8);
    for (auto& b : roi.mask) b = rng.uniform() < 0.85 ? 1 : 0;
    auto levels = quantize(img, roi, levels_quantizer(n_levels, 0.0f, float(n_levels)));
    for (auto& off : offsets) {
      auto got = glcm_offset(levels, 8, 8, n_levels, off[0], off[1]);
      auto want = glcm_oracle(levels, 8, 8, n_levels, off[0], off[1]);
      REQUIRE(got.size() == want.size());
      for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);

      auto rg = glrlm_offset(levels, 8, 8, n_levels, off[0], off[1]);
      auto rw = glrlm_oracle(levels, 8, 8, n_levels, off[0], off[1]);
      REQUIRE(rg.size() == rw.size());
      for (size_t i = 0; i < rg.size(); ++i) CHECK(rg[i] == rw[i]);
    }
  }
}

TEST_CASE("constant ROI follows the degenerate conventions") {
  Tensor img({6, 6}, Unit::HU);
  for (float& v : img.data) v = 42.0f;
  RoiMask roi = testutil::full_roi(6, 6);
  FeatureVector fv = extract_features(img, roi, QuantizerSpec{});
  CHECK(fv.at("glcm.entropy") == 0.0);
  CHECK(fv.at("glcm.correlation") == 1.0);
  CHECK(fv.at("glcm.contrast") == 0.0);
  CHECK(fv.at("id.std") == 0.0);
  CHECK(fv.at("id.skewness") == 0.0);
  CHECK(fv.at("goh.entropy") == doctest::Approx(3.0));  // uniform 8 bins
  CHECK(fv.all_finite());
}

TEST_CASE("rotating image and ROI by 90 degrees preserves offset-averaged classes") {
  Tensor img = random_levels_image(10, 12, 6, 7);
  Rng rng(8);
  RoiMask roi(10, 12);
  for (auto& b : roi.mask) b = rng.uniform() < 0.7 ? 1 : 0;
  while (roi.count() < 16) roi.mask[rng.below(120)] = 1;

  QuantizerSpec q = levels_quantizer(6, 0.0f, 6.0f);
  FeatureVector a = extract_features(img, roi, q);
  FeatureVector b = extract_features(rot90(img), rot90(roi), q);
  for (const auto& [name, v] : a.items) {
    auto cls = class_of_feature(name);
    if (cls == FeatureClass::GLCM || cls == FeatureClass::GLRLM ||
        cls == FeatureClass::NID) {
      CHECK(std::abs(v - b.at(name)) < 1e-9);
    }
  }
}

TEST_CASE("min-max quantization makes quantized-domain features shift invariant") {
  Tensor img = random_levels_image(9, 9, 8, 17);
  RoiMask roi = testutil::full_roi(9, 9);
  QuantizerSpec q;
  q.n_levels = 8;
  q.mode = QuantizerSpec::Range::RoiMinMax;

  Tensor shifted = img;
  for (float& v : shifted.data) v += 100.0f;

  FeatureVector a = extract_features(img, roi, q);
  FeatureVector b = extract_features(shifted, roi, q);
  for (const auto& [name, v] : a.items) {
    auto cls = class_of_feature(name);
    if (cls == FeatureClass::ID) continue;  // raw-intensity class shifts
    CHECK(std::abs(v - b.at(name)) < 1e-12);
  }
}

TEST_CASE("feature inventory: 45 features across all six classes, stable names") {
  Tensor img = random_levels_image(12, 12, 16, 3);
  RoiMask roi = testutil::full_roi(12, 12);
  FeatureVector fv = extract_features(img, roi, QuantizerSpec{});
  CHECK(fv.size() >= 40);
  CHECK(fv.size() == 45);
  std::set<std::string> prefixes;
  for (const auto& [name, v] : fv.items)
    prefixes.insert(name.substr(0, name.find('.')));
  CHECK(prefixes == std::set<std::string>{"glcm", "glrlm", "goh", "id", "ih", "nid"});
  FeatureVector fv2 = extract_features(img, roi, QuantizerSpec{});
  REQUIRE(fv2.size() == fv.size());
  for (size_t i = 0; i < fv.size(); ++i) {
    CHECK(fv.items[i].first == fv2.items[i].first);
    CHECK(fv.items[i].second == fv2.items[i].second);
  }
}

TEST_CASE("small ROI rejected") {
  Tensor img({8, 8}, Unit::HU);
  RoiMask roi(8, 8);
  for (int i = 0; i < 15; ++i) roi.mask[i] = 1;
  CHECK_THROWS_AS(extract_features(img, roi, QuantizerSpec{}), ValidationError);
}

TEST_CASE("intensity-direct order statistics hand checks") {
  // ROI holds exactly the values 1..16
  Tensor img({4, 4}, Unit::HU);
  for (uint32_t i = 0; i < 16; ++i) img.data[i] = float(i + 1);
  RoiMask roi = testutil::full_roi(4, 4);
  FeatureVector fv = extract_features(img, roi, QuantizerSpec{});
  CHECK(fv.at("id.mean") == doctest::Approx(8.5));
  CHECK(fv.at("id.median") == doctest::Approx(8.5));
  CHECK(fv.at("id.min") == 1.0);
  CHECK(fv.at("id.max") == 16.0);
  CHECK(fv.at("id.range") == 15.0);
  CHECK(fv.at("id.p25") == doctest::Approx(4.75));  // 0.25*(16-1)=3.75 -> 4+0.75
  CHECK(fv.at("id.p75") == doctest::Approx(12.25));
  double energy = 0;
  for (int i = 1; i <= 16; ++i) energy += double(i) * i;
  CHECK(fv.at("id.energy") == doctest::Approx(energy));
  CHECK(fv.at("id.rms") == doctest::Approx(std::sqrt(energy / 16.0)));
}
