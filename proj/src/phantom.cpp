#include "ctstd/phantom.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "ctstd/kernels.hpp"
#include "ctstd/rng.hpp"

namespace ctstd::phantom {

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

// Fixed global texture basis: mid-band cosine modes shared by every sample,
// so a pair's textures differ only through the kernel MTF and quantum noise.
struct TextureBasis {
  std::vector<double> fx, fy;  // cycles/pixel
};

TextureBasis make_basis(int n_modes, double f_lo, double f_hi, uint64_t seed) {
  Rng rng(seed);
  TextureBasis b;
  for (int i = 0; i < n_modes; ++i) {
    double f = f_lo + (f_hi - f_lo) * rng.uniform();
    double th = rng.uniform(0.0, 2.0 * M_PI);
    b.fx.push_back(f * std::cos(th));
    b.fy.push_back(f * std::sin(th));
  }
  return b;
}

const TextureBasis& lung_basis() {
  static TextureBasis b = make_basis(24, 0.06, 0.20, 0xC0FFEE11);
  return b;
}

const TextureBasis& tumor_basis() {
  static TextureBasis b = make_basis(12, 0.08, 0.24, 0xC0FFEE22);
  return b;
}

// texture(p) = sum_j a_j cos(2 pi f_j . p) + b_j sin(2 pi f_j . p)
void add_texture(Tensor& img, const std::vector<uint8_t>& region,
                 const TextureBasis& basis, const std::vector<double>& amp_cos,
                 const std::vector<double>& amp_sin) {
  int h = int(img.rows()), w = int(img.cols());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!region[size_t(y) * w + x]) continue;
      double v = 0.0;
      for (size_t j = 0; j < basis.fx.size(); ++j) {
        double ph = 2.0 * M_PI * (basis.fx[j] * x + basis.fy[j] * y);
        v += amp_cos[j] * std::cos(ph) + amp_sin[j] * std::sin(ph);
      }
      img.at(y, x) += float(v);
    }
  }
}

std::vector<double> draw_amplitudes(Rng& rng, size_t n, double total_sigma) {
  // each of the 2n quadrature components carries total_sigma^2 / (2n) variance
  std::vector<double> a(n);
  double per = total_sigma / std::sqrt(double(n));
  for (double& v : a) v = rng.normal(0.0, per * M_SQRT1_2);
  return a;
}

struct Ellipse {
  double cx, cy, ax, ay;
  bool contains(double x, double y, double margin = 0.0) const {
    double u = (x - cx) / (ax - margin), v = (y - cy) / (ay - margin);
    return u * u + v * v <= 1.0;
  }
};

}  // namespace

void KernelSpec::validate() const {
  if (!(cutoff > 0.0f && cutoff <= 0.5f))
    throw ValidationError("kernel cutoff must be in (0, 0.5]");
  if (boost < 0.0f) throw ValidationError("kernel boost must be >= 0");
  if (noise_sigma < 0.0f) throw ValidationError("noise sigma must be >= 0");
}

KernelSpec smooth_kernel() {
  return {"smooth40", KernelSpec::Mtf::Smooth, 0.10f, 0.0f, 5.0f};
}

KernelSpec sharp_kernel() {
  return {"sharp64", KernelSpec::Mtf::Sharp, 0.16f, 0.9f, 14.0f};
}

std::pair<Tensor, std::vector<RoiMask>> gen_ct_phantom(uint64_t seed, int size,
                                                       int n_tumors) {
  if (size < 64) throw ValidationError("phantom size must be >= 64");
  if (n_tumors < 0) throw ValidationError("n_tumors must be >= 0");
  Rng rng(seed);
  const int h = size, w = size;
  Tensor img({uint32_t(h), uint32_t(w)}, Unit::HU);

  Ellipse body{w * 0.5, h * 0.52, w * 0.44, h * 0.36};
  Ellipse lungs[2] = {
      {w * 0.33, h * 0.50, w * 0.155, h * 0.24},
      {w * 0.67, h * 0.50, w * 0.155, h * 0.24},
  };

  std::vector<uint8_t> lung_mask(size_t(h) * w, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v;
      if (!body.contains(x, y)) {
        v = -1000.0;
      } else {
        double u = (x - body.cx) / body.ax, t = (y - body.cy) / body.ay;
        v = 50.0 - 15.0 * (u * u + t * t);  // soft tissue with a mild falloff
        for (const Ellipse& lung : lungs)
          if (lung.contains(x, y)) {
            v = -850.0;
            lung_mask[size_t(y) * w + x] = 1;
          }
      }
      img.at(y, x) = float(v);
    }

  // per-sample lung texture amplitudes over the fixed global basis
  auto lc = draw_amplitudes(rng, lung_basis().fx.size(), 90.0);
  auto ls = draw_amplitudes(rng, lung_basis().fx.size(), 90.0);
  add_texture(img, lung_mask, lung_basis(), lc, ls);

  // tumor placement inside the lung fields
  std::vector<RoiMask> rois;
  struct Blob { double x, y, r; };
  std::vector<Blob> blobs;
  for (int t = 0; t < n_tumors; ++t) {
    double r = 6.0 + 4.0 * rng.uniform();
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      const Ellipse& lung = lungs[(t + attempt) % 2];
      double x = lung.cx + (2.0 * rng.uniform() - 1.0) * lung.ax;
      double y = lung.cy + (2.0 * rng.uniform() - 1.0) * lung.ay;
      if (!lung.contains(x, y, r + 3.0)) continue;
      bool clash = false;
      for (const Blob& o : blobs)
        if (std::hypot(x - o.x, y - o.y) < r + o.r + 4.0) clash = true;
      if (clash) continue;
      blobs.push_back({x, y, r});
      placed = true;
    }
    if (!placed)
      throw ValidationError("could not place tumors; reduce n_tumors or grow size");
  }

  std::vector<uint8_t> tumor_mask(size_t(h) * w, 0);
  for (const Blob& blob : blobs) {
    RoiMask roi(uint32_t(h), uint32_t(w));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double d = std::hypot(x - blob.x, y - blob.y);
        if (d > blob.r + 1.5) continue;
        // soft rim over ~2px so the disk edge is not a step
        double edge = std::clamp((blob.r - d) / 2.0 + 0.5, 0.0, 1.0);
        size_t i = size_t(y) * w + x;
        img.data[i] = float((1.0 - edge) * img.data[i] + edge * 20.0);
        if (edge > 0.0) tumor_mask[i] = 1;
        if (d <= blob.r - 1.0) roi.mask[i] = 1;  // interior-only ROI
      }
    if (roi.count() < 16)
      throw ValidationError("tumor ROI below 16 pixels");
    rois.push_back(std::move(roi));
  }

  auto tc = draw_amplitudes(rng, tumor_basis().fx.size(), 70.0);
  auto ts = draw_amplitudes(rng, tumor_basis().fx.size(), 70.0);
  add_texture(img, tumor_mask, tumor_basis(), tc, ts);

  img.require_finite("gen_ct_phantom");
  return {std::move(img), std::move(rois)};
}

namespace {

// MTF gain at radial frequency f (cycles/pixel, clamped to the axial
// Nyquist so that cutoff = 0.5 means an all-pass filter).
double mtf_gain(const KernelSpec& k, double f) {
  double fr = std::min(f, 0.5);
  double width = k.cutoff * 0.5;
  if (k.mtf_shape == KernelSpec::Mtf::Smooth) {
    if (fr <= k.cutoff) return 1.0;
    double d = (fr - k.cutoff) / width;
    return std::exp(-0.5 * d * d);
  }
  auto band = [&](double q) {
    double d = (q - k.cutoff) / width;
    return std::exp(-0.5 * d * d);
  };
  return 1.0 + k.boost * (band(fr) - band(0.0));  // pinned to gain 1 at DC
}

// real 2-D filter through FFTW, unit-gain at DC
void fft_filter(const std::vector<double>& in, std::vector<double>& out, int h,
                int w, const std::vector<double>& gain) {
  std::vector<double> buf(in);
  std::vector<fftw_complex> freq(size_t(h) * (w / 2 + 1));
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan fwd = fftw_plan_dft_r2c_2d(h, w, buf.data(), freq.data(),
                                         FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
  }
  for (size_t i = 0; i < freq.size(); ++i) {
    freq[i][0] *= gain[i];
    freq[i][1] *= gain[i];
  }
  out.assign(size_t(h) * w, 0.0);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan bwd = fftw_plan_dft_c2r_2d(h, w, freq.data(), out.data(),
                                         FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
  }
  double norm = 1.0 / (double(h) * w);
  for (double& v : out) v *= norm;
}

std::vector<double> gain_grid(const KernelSpec& k, int h, int w) {
  std::vector<double> gain(size_t(h) * (w / 2 + 1));
  for (int y = 0; y < h; ++y) {
    double fy = (y <= h / 2 ? y : y - h) / double(h);
    for (int x = 0; x <= w / 2; ++x) {
      double fx = x / double(w);
      gain[size_t(y) * (w / 2 + 1) + x] = mtf_gain(k, std::hypot(fx, fy));
    }
  }
  return gain;
}

}  // namespace

Tensor apply_kernel(const Tensor& img, const KernelSpec& k, uint64_t noise_seed) {
  if (!img.is_2d()) throw ShapeError("apply_kernel expects a 2-D image");
  k.validate();
  int h = int(img.rows()), w = int(img.cols());
  std::vector<double> gain = gain_grid(k, h, w);

  bool identity_gain = true;
  for (double g : gain)
    if (g != 1.0) identity_gain = false;
  if (identity_gain && k.noise_sigma == 0.0f) return img;  // exact pass-through

  std::vector<double> in(img.data.begin(), img.data.end()), filtered;
  fft_filter(in, filtered, h, w, gain);

  if (k.noise_sigma > 0.0f) {
    Rng rng(noise_seed);
    std::vector<double> white(size_t(h) * w), shaped;
    for (double& v : white) v = rng.normal();
    fft_filter(white, shaped, h, w, gain);  // quantum noise shares the MTF
    double mean = 0.0;
    for (double v : shaped) mean += v;
    mean /= shaped.size();
    double var = 0.0;
    for (double v : shaped) var += (v - mean) * (v - mean);
    var /= shaped.size();
    double scale = var > 0.0 ? k.noise_sigma / std::sqrt(var) : 0.0;
    for (size_t i = 0; i < filtered.size(); ++i)
      filtered[i] += (shaped[i] - mean) * scale;  // exactly zero-mean noise
  }

  Tensor out({uint32_t(h), uint32_t(w)}, img.unit);
  for (size_t i = 0; i < filtered.size(); ++i) out.data[i] = float(filtered[i]);
  out.require_finite("apply_kernel");
  return out;
}

std::vector<PairedSample> gen_paired_dataset(uint64_t seed, int n, int size) {
  if (n < 1) throw ValidationError("dataset size must be >= 1");
  std::vector<PairedSample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto [base, rois] = gen_ct_phantom(derive_seed(seed, uint64_t(i) * 3), size, 3);
    PairedSample s;
    s.tumor_rois = std::move(rois);
    s.a = apply_kernel(base, smooth_kernel(), derive_seed(seed, uint64_t(i) * 3 + 1));
    s.b = apply_kernel(base, sharp_kernel(), derive_seed(seed, uint64_t(i) * 3 + 2));
    samples.push_back(std::move(s));
  }
  return samples;
}

Tensor gen_uk_phantom(int size) {
  if (size < 64) throw ValidationError("phantom size must be >= 64");
  Tensor flow({uint32_t(size), uint32_t(size)}, Unit::Normalized);
  double s = size;
  double stroke = 0.075 * s;

  auto in_rect = [](double x, double y, double x0, double y0, double x1,
                    double y1) { return x >= x0 && x < x1 && y >= y0 && y < y1; };
  // distance from point to segment
  auto seg_dist = [](double px, double py, double ax, double ay, double bx,
                     double by) {
    double vx = bx - ax, vy = by - ay;
    double t = ((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy);
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
  };

  double top = 0.22 * s, bot = 0.78 * s;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double fx = x, fy = y;
      bool on = false;
      // U: two verticals plus the bottom bar
      on |= in_rect(fx, fy, 0.10 * s, top, 0.10 * s + stroke, bot);
      on |= in_rect(fx, fy, 0.34 * s, top, 0.34 * s + stroke, bot);
      on |= in_rect(fx, fy, 0.10 * s, bot - stroke, 0.34 * s + stroke, bot);
      // K: vertical plus two diagonals
      on |= in_rect(fx, fy, 0.56 * s, top, 0.56 * s + stroke, bot);
      on |= seg_dist(fx, fy, 0.60 * s, 0.52 * s, 0.88 * s, top) < stroke * 0.55;
      on |= seg_dist(fx, fy, 0.60 * s, 0.52 * s, 0.88 * s, bot) < stroke * 0.55;
      flow.at(y, x) = on ? 1.0f : 0.0f;
    }
  return flow;
}

Tensor simulate_gated_speckle(const Tensor& flow, int gates, double depth_blur,
                              uint64_t seed, double gamma_shape,
                              double read_sigma) {
  if (gates < 1) throw ValidationError("gates must be >= 1");
  if (!flow.is_2d()) throw ShapeError("flow map must be 2-D");
  int h = int(flow.rows()), w = int(flow.cols());

  std::vector<float> blurred(size_t(h) * w);
  kern::gaussian_blur(flow.data.data(), blurred.data(), h, w, depth_blur);

  Tensor stack({uint32_t(gates), uint32_t(h), uint32_t(w)}, Unit::Normalized);
  Rng rng(seed);
  for (int g = 0; g < gates; ++g) {
    float* frame = stack.data.data() + size_t(g) * h * w;
    for (size_t i = 0; i < size_t(h) * w; ++i) {
      double v = blurred[i];
      if (gamma_shape > 0.0) v *= rng.gamma_unit_mean(gamma_shape);
      if (read_sigma > 0.0) v += rng.normal(0.0, read_sigma);
      frame[i] = float(std::max(0.0, v));
    }
  }
  return stack;
}

}  // namespace ctstd::phantom
