#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ctstd/errors.hpp"

namespace ctstd {

enum class Unit : uint8_t { HU = 0, Normalized = 1, Dimensionless = 2 };

/// N-dimensional row-major float32 tensor with shape metadata. Carries CT
/// slices, latent vectors and speckle maps alike.
struct Tensor {
  std::vector<uint32_t> shape;
  std::vector<float> data;
  Unit unit = Unit::Dimensionless;

  Tensor() = default;
  Tensor(std::vector<uint32_t> s, Unit u = Unit::Dimensionless)
      : shape(std::move(s)), unit(u) {
    data.assign(element_count(shape), 0.0f);
  }

  static size_t element_count(const std::vector<uint32_t>& s) {
    size_t n = 1;
    for (uint32_t d : s) {
      if (d == 0) throw ValidationError("tensor dimension must be positive");
      if (n > (size_t(1) << 31) / d) throw ValidationError("tensor too large");
      n *= d;
    }
    return n;
  }

  size_t size() const { return data.size(); }
  uint32_t dim(size_t i) const { return shape.at(i); }
  bool is_2d() const { return shape.size() == 2; }

  uint32_t rows() const {
    if (!is_2d()) throw ShapeError("expected 2-D tensor");
    return shape[0];
  }
  uint32_t cols() const {
    if (!is_2d()) throw ShapeError("expected 2-D tensor");
    return shape[1];
  }

  float& at(uint32_t r, uint32_t c) { return data[size_t(r) * shape[1] + c]; }
  float at(uint32_t r, uint32_t c) const { return data[size_t(r) * shape[1] + c]; }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void require_finite(const std::string& ctx) const {
    if (!all_finite()) throw ValidationError(ctx + ": non-finite values");
  }

  bool operator==(const Tensor& o) const {
    if (shape != o.shape || unit != o.unit || data.size() != o.data.size())
      return false;
    for (size_t i = 0; i < data.size(); ++i)
      if (data[i] != o.data[i]) return false;
    return true;
  }
};

/// Boolean region-of-interest mask over a 2-D slice.
struct RoiMask {
  uint32_t rows = 0, cols = 0;
  std::vector<uint8_t> mask;  // 0 or 1

  RoiMask() = default;
  RoiMask(uint32_t r, uint32_t c) : rows(r), cols(c), mask(size_t(r) * c, 0) {}

  uint8_t& at(uint32_t r, uint32_t c) { return mask[size_t(r) * cols + c]; }
  uint8_t at(uint32_t r, uint32_t c) const { return mask[size_t(r) * cols + c]; }

  size_t count() const {
    size_t n = 0;
    for (uint8_t m : mask) n += m ? 1 : 0;
    return n;
  }

  Tensor to_tensor() const {
    Tensor t({rows, cols}, Unit::Dimensionless);
    for (size_t i = 0; i < mask.size(); ++i) t.data[i] = mask[i] ? 1.0f : 0.0f;
    return t;
  }

  static RoiMask from_tensor(const Tensor& t) {
    RoiMask m(t.rows(), t.cols());
    for (size_t i = 0; i < t.data.size(); ++i) m.mask[i] = t.data[i] > 0.5f;
    return m;
  }
};

/// Display window in Hounsfield units.
struct WindowLevel {
  float lo;
  float hi;

  WindowLevel(float l, float h) : lo(l), hi(h) {
    if (!(lo < hi)) throw ValidationError("window requires lo < hi");
  }
};

}  // namespace ctstd
