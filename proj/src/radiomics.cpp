#include "ctstd/radiomics.hpp"

#include <algorithm>
#include <cmath>

namespace ctstd::radiomics {

namespace {
constexpr double kEps = 1e-6;

double log2_safe(double p) { return p > 0.0 ? std::log2(p) : 0.0; }

// numpy-style percentile with linear interpolation, x must be sorted
double percentile(const std::vector<double>& x, double q) {
  if (x.size() == 1) return x[0];
  double pos = q * double(x.size() - 1);
  size_t lo = size_t(pos);
  size_t hi = std::min(lo + 1, x.size() - 1);
  double frac = pos - double(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}
}  // namespace

const char* class_prefix(FeatureClass c) {
  switch (c) {
    case FeatureClass::GOH: return "goh";
    case FeatureClass::GLCM: return "glcm";
    case FeatureClass::GLRLM: return "glrlm";
    case FeatureClass::ID: return "id";
    case FeatureClass::IH: return "ih";
    case FeatureClass::NID: return "nid";
  }
  return "";
}

FeatureClass class_of_feature(const std::string& name) {
  size_t dot = name.find('.');
  std::string p = name.substr(0, dot);
  if (p == "goh") return FeatureClass::GOH;
  if (p == "glcm") return FeatureClass::GLCM;
  if (p == "glrlm") return FeatureClass::GLRLM;
  if (p == "id") return FeatureClass::ID;
  if (p == "ih") return FeatureClass::IH;
  if (p == "nid") return FeatureClass::NID;
  throw ValidationError("unknown feature class in name: " + name);
}

double FeatureVector::at(const std::string& name) const {
  const double* v = find(name);
  if (!v) throw ValidationError("missing feature: " + name);
  return *v;
}

const double* FeatureVector::find(const std::string& name) const {
  for (const auto& [n, v] : items)
    if (n == name) return &v;
  return nullptr;
}

bool FeatureVector::all_finite() const {
  for (const auto& [n, v] : items)
    if (!std::isfinite(v)) return false;
  return true;
}

void QuantizerSpec::validate() const {
  if (n_levels < 2) throw ValidationError("quantizer needs >= 2 levels");
  if (mode == Range::FixedHU && !(lo < hi))
    throw ValidationError("quantizer range requires lo < hi");
}

std::vector<int> quantize(const Tensor& img, const RoiMask& roi,
                          const QuantizerSpec& q) {
  q.validate();
  int h = int(img.rows()), w = int(img.cols());
  if (roi.rows != img.rows() || roi.cols != img.cols())
    throw ShapeError("ROI shape does not match image");
  float lo = q.lo, hi = q.hi;
  if (q.mode == QuantizerSpec::Range::RoiMinMax) {
    lo = 3.4e38f;
    hi = -3.4e38f;
    for (int i = 0; i < h * w; ++i)
      if (roi.mask[i]) {
        lo = std::min(lo, img.data[i]);
        hi = std::max(hi, img.data[i]);
      }
    if (!(lo < hi)) hi = lo + 1.0f;  // constant ROI maps to level 0
  }
  std::vector<int> levels(size_t(h) * w, -1);
  double span = double(hi) - double(lo);
  for (int i = 0; i < h * w; ++i) {
    if (!roi.mask[i]) continue;
    int l = int(std::floor((double(img.data[i]) - lo) / span * q.n_levels));
    levels[i] = std::clamp(l, 0, q.n_levels - 1);
  }
  return levels;
}

std::vector<double> glcm_offset(const std::vector<int>& levels, int h, int w,
                                int n_levels, int dy, int dx) {
  std::vector<double> m(size_t(n_levels) * n_levels, 0.0);
  double total = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int a = levels[size_t(y) * w + x];
      if (a < 0) continue;
      int ny = y + dy, nx = x + dx;
      if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
      int b = levels[size_t(ny) * w + nx];
      if (b < 0) continue;
      m[size_t(a) * n_levels + b] += 1.0;
      m[size_t(b) * n_levels + a] += 1.0;
      total += 2.0;
    }
  if (total > 0.0)
    for (double& v : m) v /= total;
  return m;
}

std::vector<double> glrlm_offset(const std::vector<int>& levels, int h, int w,
                                 int n_levels, int dy, int dx) {
  int max_run = std::max(h, w);
  std::vector<double> r(size_t(n_levels) * max_run, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int l = levels[size_t(y) * w + x];
      if (l < 0) continue;
      // count only at run starts: predecessor absent or different
      int py = y - dy, px = x - dx;
      if (py >= 0 && py < h && px >= 0 && px < w &&
          levels[size_t(py) * w + px] == l)
        continue;
      int len = 0, cy = y, cx = x;
      while (cy >= 0 && cy < h && cx >= 0 && cx < w &&
             levels[size_t(cy) * w + cx] == l) {
        ++len;
        cy += dy;
        cx += dx;
      }
      r[size_t(l) * max_run + std::min(len, max_run) - 1] += 1.0;
    }
  return r;
}

namespace {

const int kOffsets[4][2] = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};

struct GlcmFeatures {
  double energy = 0, contrast = 0, correlation = 1, homogeneity = 0,
         entropy = 0, dissimilarity = 0;
};

GlcmFeatures glcm_features(const std::vector<double>& p, int n) {
  GlcmFeatures f;
  double total = 0.0;
  for (double v : p) total += v;
  if (total <= 0.0) return f;  // no co-occurring pairs in ROI
  std::vector<double> marg(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) marg[i] += p[size_t(i) * n + j];
  double mu = 0.0;
  for (int i = 0; i < n; ++i) mu += i * marg[i];
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += (i - mu) * (i - mu) * marg[i];
  double cross = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = p[size_t(i) * n + j];
      if (v == 0.0) continue;
      f.energy += v * v;
      f.contrast += double(i - j) * (i - j) * v;
      f.homogeneity += v / (1.0 + std::abs(i - j));
      f.entropy -= v * log2_safe(v);
      f.dissimilarity += std::abs(i - j) * v;
      cross += i * j * v;
    }
  // zero-variance ROI: perfectly concordant by convention
  f.correlation = var > 1e-12 ? (cross - mu * mu) / var : 1.0;
  return f;
}

struct GlrlmFeatures {
  double sre = 0, lre = 0, gln = 0, rln = 0, rp = 0, lgre = 0, hgre = 0;
};

GlrlmFeatures glrlm_features(const std::vector<double>& r, int n_levels,
                             int max_run, size_t n_pixels) {
  GlrlmFeatures f;
  double nr = 0.0;
  for (double v : r) nr += v;
  if (nr <= 0.0) return f;
  std::vector<double> by_level(n_levels, 0.0), by_run(max_run, 0.0);
  for (int l = 0; l < n_levels; ++l)
    for (int j = 0; j < max_run; ++j) {
      double v = r[size_t(l) * max_run + j];
      if (v == 0.0) continue;
      double run = j + 1.0, lev = l + 1.0;
      f.sre += v / (run * run);
      f.lre += v * run * run;
      f.lgre += v / (lev * lev);
      f.hgre += v * lev * lev;
      by_level[l] += v;
      by_run[j] += v;
    }
  for (double v : by_level) f.gln += v * v;
  for (double v : by_run) f.rln += v * v;
  f.sre /= nr;
  f.lre /= nr;
  f.gln /= nr;
  f.rln /= nr;
  f.lgre /= nr;
  f.hgre /= nr;
  f.rp = nr / double(n_pixels);
  return f;
}

}  // namespace

FeatureVector extract_features(const Tensor& img, const RoiMask& roi,
                               const QuantizerSpec& q) {
  if (!img.is_2d()) throw ShapeError("extract_features expects a 2-D image");
  if (roi.rows != img.rows() || roi.cols != img.cols())
    throw ShapeError("ROI shape does not match image");
  size_t n_roi = roi.count();
  if (n_roi < 16) throw ValidationError("ROI smaller than 16 pixels");
  q.validate();

  int h = int(img.rows()), w = int(img.cols());
  std::vector<int> levels = quantize(img, roi, q);
  FeatureVector fv;

  // GLCM, offset-averaged
  {
    GlcmFeatures acc;
    double e = 0, c = 0, co = 0, ho = 0, en = 0, di = 0;
    for (auto& off : kOffsets) {
      GlcmFeatures f = glcm_features(
          glcm_offset(levels, h, w, q.n_levels, off[0], off[1]), q.n_levels);
      e += f.energy; c += f.contrast; co += f.correlation;
      ho += f.homogeneity; en += f.entropy; di += f.dissimilarity;
    }
    fv.set("glcm.energy", e / 4);
    fv.set("glcm.contrast", c / 4);
    fv.set("glcm.correlation", co / 4);
    fv.set("glcm.homogeneity", ho / 4);
    fv.set("glcm.entropy", en / 4);
    fv.set("glcm.dissimilarity", di / 4);
  }

  // GLRLM, direction-averaged
  {
    int max_run = std::max(h, w);
    double sre = 0, lre = 0, gln = 0, rln = 0, rp = 0, lgre = 0, hgre = 0;
    for (auto& off : kOffsets) {
      GlrlmFeatures f =
          glrlm_features(glrlm_offset(levels, h, w, q.n_levels, off[0], off[1]),
                         q.n_levels, max_run, n_roi);
      sre += f.sre; lre += f.lre; gln += f.gln; rln += f.rln;
      rp += f.rp; lgre += f.lgre; hgre += f.hgre;
    }
    fv.set("glrlm.sre", sre / 4);
    fv.set("glrlm.lre", lre / 4);
    fv.set("glrlm.gln", gln / 4);
    fv.set("glrlm.rln", rln / 4);
    fv.set("glrlm.rp", rp / 4);
    fv.set("glrlm.lgre", lgre / 4);
    fv.set("glrlm.hgre", hgre / 4);
  }

  // GOH: 8-bin magnitude-weighted orientation histogram, central differences
  {
    double hist[8] = {0};
    double total = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!roi.mask[size_t(y) * w + x]) continue;
        if (y == 0 || y == h - 1 || x == 0 || x == w - 1) continue;
        double gx = 0.5 * (double(img.at(y, x + 1)) - img.at(y, x - 1));
        double gy = 0.5 * (double(img.at(y + 1, x)) - img.at(y - 1, x));
        double mag = std::hypot(gx, gy);
        if (mag == 0.0) continue;
        double theta = std::atan2(gy, gx);  // (-pi, pi]
        int bin = std::clamp(int((theta + M_PI) / (M_PI / 4.0)), 0, 7);
        hist[bin] += mag;
        total += mag;
      }
    if (total > 0.0)
      for (double& v : hist) v /= total;
    else
      for (double& v : hist) v = 1.0 / 8.0;  // no preferred orientation
    double entropy = 0.0;
    for (double v : hist) entropy -= v * log2_safe(v);
    for (int b = 0; b < 8; ++b)
      fv.set("goh.bin" + std::to_string(b), hist[b]);
    fv.set("goh.entropy", entropy);
  }

  // ID: order statistics on raw intensities
  {
    std::vector<double> v;
    v.reserve(n_roi);
    for (size_t i = 0; i < img.data.size(); ++i)
      if (roi.mask[i]) v.push_back(img.data[i]);
    std::sort(v.begin(), v.end());
    double n = double(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
      double d = x - mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
    }
    m2 /= n; m3 /= n; m4 /= n;
    double sample_sd = std::sqrt(m2 * n / (n - 1.0));
    double skew = 0.0, kurt = 0.0;
    if (m2 > 1e-12) {
      double g1 = m3 / std::pow(m2, 1.5);
      skew = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);  // bias-corrected
      kurt = m4 / (m2 * m2) - 3.0;                       // excess
    }
    double energy = 0.0;
    for (double x : v) energy += x * x;
    fv.set("id.mean", mean);
    fv.set("id.median", percentile(v, 0.5));
    fv.set("id.std", sample_sd);
    fv.set("id.skewness", skew);
    fv.set("id.kurtosis", kurt);
    fv.set("id.min", v.front());
    fv.set("id.max", v.back());
    fv.set("id.range", v.back() - v.front());
    fv.set("id.p10", percentile(v, 0.10));
    fv.set("id.p25", percentile(v, 0.25));
    fv.set("id.p75", percentile(v, 0.75));
    fv.set("id.p90", percentile(v, 0.90));
    fv.set("id.energy", energy);
    fv.set("id.rms", std::sqrt(energy / n));
  }

  // IH: 64-bin histogram over the quantizer range
  {
    constexpr int kBins = 64;
    float lo = q.lo, hi = q.hi;
    if (q.mode == QuantizerSpec::Range::RoiMinMax) {
      lo = 3.4e38f;
      hi = -3.4e38f;
      for (size_t i = 0; i < img.data.size(); ++i)
        if (roi.mask[i]) {
          lo = std::min(lo, img.data[i]);
          hi = std::max(hi, img.data[i]);
        }
      if (!(lo < hi)) hi = lo + 1.0f;
    }
    double span = double(hi) - double(lo);
    std::vector<double> hist(kBins, 0.0);
    std::vector<double> bins;
    bins.reserve(n_roi);
    for (size_t i = 0; i < img.data.size(); ++i) {
      if (!roi.mask[i]) continue;
      int b = std::clamp(
          int(std::floor((double(img.data[i]) - lo) / span * kBins)), 0,
          kBins - 1);
      hist[b] += 1.0;
      bins.push_back(double(b));
    }
    for (double& v : hist) v /= double(n_roi);
    double entropy = 0.0, uniformity = 0.0;
    int mode_bin = 0;
    for (int b = 0; b < kBins; ++b) {
      entropy -= hist[b] * log2_safe(hist[b]);
      uniformity += hist[b] * hist[b];
      if (hist[b] > hist[mode_bin]) mode_bin = b;
    }
    std::sort(bins.begin(), bins.end());
    double q1 = percentile(bins, 0.25), q3 = percentile(bins, 0.75);
    double qc = (q1 + q3) > 0.0 ? (q3 - q1) / (q3 + q1) : 0.0;
    fv.set("ih.entropy", entropy);
    fv.set("ih.uniformity", uniformity);
    fv.set("ih.mode_bin", double(mode_bin));
    fv.set("ih.quartile_coef", qc);
  }

  // NID (NGTDM over a 3x3 neighborhood), 1-based level index in the formulas
  {
    std::vector<double> s(q.n_levels, 0.0), cnt(q.n_levels, 0.0);
    double n_valid = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int l = levels[size_t(y) * w + x];
        if (l < 0) continue;
        double acc = 0.0;
        int nn = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            int sy = y + dy, sx = x + dx;
            if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
            int nl = levels[size_t(sy) * w + sx];
            if (nl < 0) continue;
            acc += nl;
            ++nn;
          }
        if (nn == 0) continue;
        s[l] += std::abs(double(l) - acc / nn);
        cnt[l] += 1.0;
        n_valid += 1.0;
      }
    double coarseness = 0, contrast = 0, busyness = 0, complexity = 0,
           strength = 0;
    if (n_valid > 0.0) {
      std::vector<double> p(q.n_levels, 0.0);
      int ng = 0;
      double sum_ps = 0.0, sum_s = 0.0;
      for (int l = 0; l < q.n_levels; ++l) {
        p[l] = cnt[l] / n_valid;
        if (p[l] > 0.0) ++ng;
        sum_ps += p[l] * s[l];
        sum_s += s[l];
      }
      coarseness = 1.0 / (kEps + sum_ps);
      if (ng > 1) {
        double pair_contrast = 0.0, busy_den = 0.0, cplx = 0.0, stren = 0.0;
        for (int i = 0; i < q.n_levels; ++i) {
          if (p[i] == 0.0) continue;
          double li = i + 1.0;
          for (int j = 0; j < q.n_levels; ++j) {
            if (p[j] == 0.0) continue;
            double lj = j + 1.0;
            double dl = li - lj;
            pair_contrast += p[i] * p[j] * dl * dl;
            busy_den += std::abs(li * p[i] - lj * p[j]);
            if (i != j) {
              cplx += std::abs(dl) * (p[i] * s[i] + p[j] * s[j]) /
                      (n_valid * (p[i] + p[j]));
              stren += (p[i] + p[j]) * dl * dl;
            }
          }
        }
        contrast = pair_contrast / (ng * (ng - 1.0)) * (sum_s / n_valid);
        busyness = busy_den > 0.0 ? sum_ps / busy_den : 0.0;
        complexity = cplx;
        strength = stren / (kEps + sum_s);
      }
    }
    fv.set("nid.coarseness", std::min(coarseness, 1.0 / kEps));
    fv.set("nid.contrast", contrast);
    fv.set("nid.busyness", busyness);
    fv.set("nid.complexity", complexity);
    fv.set("nid.strength", strength);
  }

  return fv;
}

}  // namespace ctstd::radiomics
