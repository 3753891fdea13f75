#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctstd/tensor.hpp"

namespace ctstd::radiomics {

enum class FeatureClass { GOH, GLCM, GLRLM, ID, IH, NID };

const char* class_prefix(FeatureClass c);
FeatureClass class_of_feature(const std::string& name);

/// Ordered feature-name -> value map. Names carry their class prefix
/// ("glcm.contrast"); ordering is the fixed extraction order.
struct FeatureVector {
  std::vector<std::pair<std::string, double>> items;

  void set(const std::string& name, double v) { items.emplace_back(name, v); }
  double at(const std::string& name) const;
  const double* find(const std::string& name) const;
  size_t size() const { return items.size(); }
  bool all_finite() const;
};

/// Gray-level quantization applied before the texture matrices.
struct QuantizerSpec {
  int n_levels = 32;
  enum class Range { FixedHU, RoiMinMax } mode = Range::FixedHU;
  float lo = -1000.0f;
  float hi = 400.0f;

  void validate() const;
};

/// Quantized level grid: level in [0, n_levels) inside the ROI, -1 outside.
std::vector<int> quantize(const Tensor& img, const RoiMask& roi,
                          const QuantizerSpec& q);

/// Symmetric normalized co-occurrence matrix for a single offset, as a
/// dense n_levels x n_levels row-major array. Exposed for the enumeration
/// oracle in the tests.
std::vector<double> glcm_offset(const std::vector<int>& levels, int h, int w,
                                int n_levels, int dy, int dx);

/// Run-length counts R[level][run_length-1] for one direction, row-major
/// [n_levels x max_run]. max_run = max(h, w).
std::vector<double> glrlm_offset(const std::vector<int>& levels, int h, int w,
                                 int n_levels, int dy, int dx);

/// Extracts the full 45-feature vector over the ROI (all six classes).
/// ROI must cover at least 16 pixels. Degenerate inputs (constant ROI)
/// produce finite values via documented conventions, never NaN.
FeatureVector extract_features(const Tensor& img, const RoiMask& roi,
                               const QuantizerSpec& q);

}  // namespace ctstd::radiomics
