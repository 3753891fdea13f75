#include "ctstd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctstd::metrics {

double error_rate(double f_syn, double f_ref) {
  double den = std::max(std::abs(f_ref), kErrorRateEps);
  return std::abs(f_ref - f_syn) / den * 100.0;
}

double ccc(const std::vector<double>& s, const std::vector<double>& t) {
  if (s.size() != t.size()) throw ValidationError("ccc: length mismatch");
  if (s.size() < 2) throw ValidationError("ccc: need at least 2 values");
  double n = double(s.size());
  double ms = 0, mt = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    ms += s[i];
    mt += t[i];
  }
  ms /= n;
  mt /= n;
  double vs = 0, vt = 0, cov = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    double ds = s[i] - ms, dt = t[i] - mt;
    vs += ds * ds;
    vt += dt * dt;
    cov += ds * dt;
  }
  vs /= n;
  vt /= n;
  cov /= n;
  double dm = ms - mt;
  if (vs == 0.0 && vt == 0.0) return dm == 0.0 ? 1.0 : 0.0;
  if (vs == 0.0 || vt == 0.0) return 0.0;
  return 2.0 * cov / (vs + vt + dm * dm);
}

double class_ccc(const radiomics::FeatureVector& s,
                 const radiomics::FeatureVector& t,
                 radiomics::FeatureClass cls) {
  std::string prefix = std::string(radiomics::class_prefix(cls)) + ".";
  std::vector<std::string> names;
  for (const auto& [name, v] : s.items)
    if (name.rfind(prefix, 0) == 0) names.push_back(name);
  std::sort(names.begin(), names.end());
  if (names.size() < 2)
    throw ValidationError("class_ccc: class needs at least 2 features");
  std::vector<double> vs, vt;
  vs.reserve(names.size());
  vt.reserve(names.size());
  for (const std::string& name : names) {
    vs.push_back(s.at(name));
    vt.push_back(t.at(name));  // throws if the class is missing on t
  }
  return ccc(vs, vt);
}

namespace {
constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

const double* gauss_window() {
  static double w[kWin * kWin];
  static bool init = false;
  if (!init) {
    double total = 0.0;
    for (int y = 0; y < kWin; ++y)
      for (int x = 0; x < kWin; ++x) {
        double dy = y - kWin / 2, dx = x - kWin / 2;
        w[y * kWin + x] = std::exp(-(dx * dx + dy * dy) / (2 * kSigma * kSigma));
        total += w[y * kWin + x];
      }
    for (double& v : w) v /= total;
    init = true;
  }
  return w;
}
}  // namespace

double ssim(const Tensor& x, const Tensor& y, double peak) {
  if (!x.is_2d() || !y.is_2d()) throw ShapeError("ssim expects 2-D tensors");
  if (x.shape != y.shape) throw ShapeError("ssim: shape mismatch");
  int h = int(x.rows()), w = int(x.cols());
  if (h < kWin || w < kWin)
    throw ShapeError("ssim: image smaller than the 11x11 window");
  const double* g = gauss_window();
  const double c1 = (kK1 * peak) * (kK1 * peak);
  const double c2 = (kK2 * peak) * (kK2 * peak);
  double acc = 0.0;
  long n_win = 0;
#pragma omp parallel for schedule(static) reduction(+ : acc, n_win) \
    if (size_t(h) * w > 16384)
  for (int y0 = 0; y0 <= h - kWin; ++y0) {
    for (int x0 = 0; x0 <= w - kWin; ++x0) {
      double mx = 0, my = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          double wt = g[i * kWin + j];
          mx += wt * x.at(y0 + i, x0 + j);
          my += wt * y.at(y0 + i, x0 + j);
        }
      double vx = 0, vy = 0, cov = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          double wt = g[i * kWin + j];
          double dx = x.at(y0 + i, x0 + j) - mx;
          double dy = y.at(y0 + i, x0 + j) - my;
          vx += wt * dx * dx;
          vy += wt * dy * dy;
          cov += wt * dx * dy;
        }
      double num = (2 * mx * my + c1) * (2 * cov + c2);
      double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      acc += num / den;
      ++n_win;
    }
  }
  return acc / double(n_win);
}

double psnr(const Tensor& x, const Tensor& y, double peak) {
  if (!x.is_2d() || !y.is_2d()) throw ShapeError("psnr expects 2-D tensors");
  if (x.shape != y.shape) throw ShapeError("psnr: shape mismatch");
  double mse = 0.0;
  for (size_t i = 0; i < x.data.size(); ++i) {
    double d = double(x.data[i]) - y.data[i];
    mse += d * d;
  }
  mse /= double(x.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

int ReproReport::count_at(double tau) const {
  for (size_t i = 0; i < thresholds.size(); ++i)
    if (std::abs(thresholds[i] - tau) < 1e-9) return counts[i];
  throw ValidationError("threshold not on the report grid");
}

ReproReport repro_curve(
    const std::vector<std::pair<radiomics::FeatureVector,
                                radiomics::FeatureVector>>& syn_ref_pairs) {
  if (syn_ref_pairs.empty())
    throw ValidationError("repro_curve: need at least one pair");
  ReproReport rep;
  const auto& names_src = syn_ref_pairs.front().second.items;
  for (const auto& [name, v] : names_src) rep.feature_names.push_back(name);

  for (const std::string& name : rep.feature_names) {
    double acc = 0.0;
    bool degen = false;
    for (const auto& [syn, ref] : syn_ref_pairs) {
      double fs = syn.at(name), fr = ref.at(name);
      if (std::abs(fr) <= kErrorRateEps) degen = true;
      acc += error_rate(fs, fr);
    }
    rep.mean_errors.push_back(acc / double(syn_ref_pairs.size()));
    rep.degenerate.push_back(degen);
  }

  for (int i = 0; i <= 50; ++i) {
    double tau = i / 100.0;
    int count = 0;
    for (double e : rep.mean_errors)
      if (e < tau * 100.0) ++count;
    rep.thresholds.push_back(tau);
    rep.counts.push_back(count);
  }

  using radiomics::FeatureClass;
  for (FeatureClass cls : {FeatureClass::GOH, FeatureClass::GLCM,
                           FeatureClass::GLRLM, FeatureClass::ID,
                           FeatureClass::IH, FeatureClass::NID}) {
    std::string prefix = std::string(radiomics::class_prefix(cls)) + ".";
    int present = 0;
    for (const std::string& n : rep.feature_names)
      if (n.rfind(prefix, 0) == 0) ++present;
    if (present < 2) continue;  // class not represented in this feature set
    std::vector<double> vals;
    for (const auto& [syn, ref] : syn_ref_pairs)
      vals.push_back(class_ccc(syn, ref, cls));
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= double(vals.size());
    rep.class_ccc_mean_std[radiomics::class_prefix(cls)] = {mean,
                                                            std::sqrt(var)};
  }
  return rep;
}

}  // namespace ctstd::metrics
