#include "ctstd/kernels_ref.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace ctstd::kern::ref {

void gemm_nn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      float s = 0.0f;
      for (int kk = 0; kk < k; ++kk)
        s += a[size_t(i) * k + kk] * b[size_t(kk) * n + j];
      float* cp = c + size_t(i) * n + j;
      *cp = beta1 ? *cp + s : s;
    }
}

void gemm_tn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      float s = 0.0f;
      for (int kk = 0; kk < k; ++kk)
        s += a[size_t(kk) * m + i] * b[size_t(kk) * n + j];
      float* cp = c + size_t(i) * n + j;
      *cp = beta1 ? *cp + s : s;
    }
}

void gemm_nt(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      float s = 0.0f;
      for (int kk = 0; kk < k; ++kk)
        s += a[size_t(i) * k + kk] * b[size_t(j) * k + kk];
      float* cp = c + size_t(i) * n + j;
      *cp = beta1 ? *cp + s : s;
    }
}

void conv2d_3x3(const float* in, const float* w, float* out, int cin, int cout,
                int h, int wid) {
  const size_t plane = size_t(h) * wid;
  for (int co = 0; co < cout; ++co) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < wid; ++x) {
        float s = 0.0f;
        for (int ci = 0; ci < cin; ++ci)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              int sy = y + dy, sx = x + dx;
              if (sy < 0 || sy >= h || sx < 0 || sx >= wid) continue;
              s += w[((size_t(co) * cin + ci) * 3 + dy + 1) * 3 + dx + 1] *
                   in[size_t(ci) * plane + size_t(sy) * wid + sx];
            }
        out[size_t(co) * plane + size_t(y) * wid + x] = s;
      }
  }
}

void avgpool2x2(const float* in, float* out, int c, int h, int w) {
  int oh = h / 2, ow = w / 2;
  for (int ci = 0; ci < c; ++ci)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        float s = 0.0f;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx)
            s += in[size_t(ci) * h * w + size_t(2 * y + dy) * w + 2 * x + dx];
        out[size_t(ci) * oh * ow + size_t(y) * ow + x] = 0.25f * s;
      }
}

void upsample2x(const float* in, float* out, int c, int h, int w) {
  int oh = h * 2, ow = w * 2;
  for (int ci = 0; ci < c; ++ci)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x)
        out[size_t(ci) * oh * ow + size_t(y) * ow + x] =
            in[size_t(ci) * h * w + size_t(y / 2) * w + x / 2];
}

void sobel_mag(const float* img, float* mag, int h, int w) {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (y == 0 || y == h - 1 || x == 0 || x == w - 1) {
        mag[size_t(y) * w + x] = 0.0f;
        continue;
      }
      auto px = [&](int yy, int xx) { return img[size_t(yy) * w + xx]; };
      float sx = (px(y - 1, x + 1) + 2.0f * px(y, x + 1) + px(y + 1, x + 1)) -
                 (px(y - 1, x - 1) + 2.0f * px(y, x - 1) + px(y + 1, x - 1));
      float sy = (px(y + 1, x - 1) + 2.0f * px(y + 1, x) + px(y + 1, x + 1)) -
                 (px(y - 1, x - 1) + 2.0f * px(y - 1, x) + px(y - 1, x + 1));
      mag[size_t(y) * w + x] = std::sqrt(sx * sx + sy * sy + 1e-12f);
    }
}

namespace {
inline int reflect_idx(int i, int n) {
  while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
  return i;
}
}  // namespace

void gaussian_blur(const float* in, float* out, int h, int w, double sigma) {
  if (sigma <= 0.0) {
    std::memcpy(out, in, sizeof(float) * size_t(h) * w);
    return;
  }
  int radius = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += taps[i + radius];
  }
  for (double& t : taps) t /= norm;
  std::vector<float> tmp(size_t(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d)
        s += taps[d + radius] * in[size_t(y) * w + reflect_idx(x + d, w)];
      tmp[size_t(y) * w + x] = float(s);
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d)
        s += taps[d + radius] * tmp[size_t(reflect_idx(y + d, h)) * w + x];
      out[size_t(y) * w + x] = float(s);
    }
}

void window_mean_std_3x3(const float* img, float* mean, float* stddev, int h,
                         int w) {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int sy = y + dy, sx = x + dx;
          if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
          s += img[size_t(sy) * w + sx];
          ++n;
        }
      double mu = s / n;
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int sy = y + dy, sx = x + dx;
          if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
          double d = img[size_t(sy) * w + sx] - mu;
          acc += d * d;
        }
      mean[size_t(y) * w + x] = float(mu);
      stddev[size_t(y) * w + x] = float(std::sqrt(acc / n));
    }
}

}  // namespace ctstd::kern::ref
