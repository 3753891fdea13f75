#pragma once

#include <vector>

#include "ctstd/rng.hpp"
#include "ctstd/tensor.hpp"

namespace testutil {

inline ctstd::Tensor make2d(std::vector<std::vector<float>> rows,
                            ctstd::Unit unit = ctstd::Unit::HU) {
  ctstd::Tensor t({uint32_t(rows.size()), uint32_t(rows[0].size())}, unit);
  for (size_t y = 0; y < rows.size(); ++y)
    for (size_t x = 0; x < rows[0].size(); ++x)
      t.at(uint32_t(y), uint32_t(x)) = rows[y][x];
  return t;
}

inline ctstd::Tensor random2d(uint32_t h, uint32_t w, uint64_t seed,
                              float lo = -1.0f, float hi = 1.0f,
                              ctstd::Unit unit = ctstd::Unit::Dimensionless) {
  ctstd::Rng rng(seed);
  ctstd::Tensor t({h, w}, unit);
  for (float& v : t.data) v = float(rng.uniform(lo, hi));
  return t;
}

inline ctstd::RoiMask full_roi(uint32_t h, uint32_t w) {
  ctstd::RoiMask m(h, w);
  for (auto& b : m.mask) b = 1;
  return m;
}

inline std::vector<float> random_vec(size_t n, uint64_t seed, float lo = -1.0f,
                                     float hi = 1.0f) {
  ctstd::Rng rng(seed);
  std::vector<float> v(n);
  for (float& x : v) x = float(rng.uniform(lo, hi));
  return v;
}

}  // namespace testutil
