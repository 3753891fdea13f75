#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ctstd/radiomics.hpp"
#include "ctstd/tensor.hpp"

namespace ctstd::metrics {

/// Relative per-feature deviation in percent: |f_ref - f_syn| / |f_ref| * 100
/// with an epsilon guard on the denominator. f_syn is the synthesized image's
/// value, f_ref the standard (reference) one.
double error_rate(double f_syn, double f_ref);

/// A feature is reproducible iff its error rate is strictly below 15%.
inline bool is_reproducible(double err_percent) { return err_percent < 15.0; }

constexpr double kErrorRateEps = 1e-12;
constexpr double kReproThresholdPercent = 15.0;

/// Concordance correlation coefficient with population-moment conventions.
/// Degenerate cases: both inputs constant -> 1 if equal means, else the
/// formula's 0; exactly one constant -> 0.
double ccc(const std::vector<double>& s, const std::vector<double>& t);

/// CCC over the two within-class feature value vectors (canonical name
/// order). Both vectors must contain the class's features, at least two.
double class_ccc(const radiomics::FeatureVector& s,
                 const radiomics::FeatureVector& t,
                 radiomics::FeatureClass cls);

/// Mean SSIM over valid (fully interior) 11x11 windows, Gaussian weighted
/// (sigma 1.5), K1=0.01, K2=0.03, dynamic range = peak.
double ssim(const Tensor& x, const Tensor& y, double peak);

/// 10*log10(peak^2 / MSE); +infinity when MSE is zero.
double psnr(const Tensor& x, const Tensor& y, double peak);

/// Reproducibility summary over a set of (synthesized, standard) feature
/// pairs, one pair per ROI.
struct ReproReport {
  std::vector<double> thresholds;        // 0.00 .. 0.50 step 0.01 (fractions)
  std::vector<int> counts;               // features with mean error < tau*100
  std::vector<std::string> feature_names;
  std::vector<double> mean_errors;       // percent, ROI-averaged per feature
  std::vector<bool> degenerate;          // reference hit the epsilon guard
  // per-class CCC aggregated over ROIs
  std::map<std::string, std::pair<double, double>> class_ccc_mean_std;

  int count_at(double tau) const;
  int total_features() const { return int(feature_names.size()); }
};

ReproReport repro_curve(
    const std::vector<std::pair<radiomics::FeatureVector,
                                radiomics::FeatureVector>>& syn_ref_pairs);

}  // namespace ctstd::metrics
