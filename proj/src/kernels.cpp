#include "ctstd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace ctstd::kern {

namespace {

// Register tile of the GEMM micro-kernel. 4x64 keeps 16 zmm accumulators
// live on AVX-512 and still vectorizes acceptably as plain arrays elsewhere.
constexpr int kTileM = 4;
constexpr int kTileN = 64;

template <bool TransA>
inline float a_elem(const float* a, int i, int k, int m, int kk) {
  return TransA ? a[size_t(k) * m + i] : a[size_t(i) * kk + k];
}

#if defined(__AVX512F__)
template <bool TransA>
inline void tile_4x64(const float* a, const float* b, float* c, int i0, int j0,
                      int m, int n, int k, bool beta1) {
  __m512 acc[kTileM][4];
  for (int i = 0; i < kTileM; ++i)
    for (int v = 0; v < 4; ++v) acc[i][v] = _mm512_setzero_ps();
  for (int kk = 0; kk < k; ++kk) {
    const float* brow = b + size_t(kk) * n + j0;
    __m512 b0 = _mm512_loadu_ps(brow);
    __m512 b1 = _mm512_loadu_ps(brow + 16);
    __m512 b2 = _mm512_loadu_ps(brow + 32);
    __m512 b3 = _mm512_loadu_ps(brow + 48);
    for (int i = 0; i < kTileM; ++i) {
      __m512 av = _mm512_set1_ps(a_elem<TransA>(a, i0 + i, kk, m, k));
      acc[i][0] = _mm512_fmadd_ps(av, b0, acc[i][0]);
      acc[i][1] = _mm512_fmadd_ps(av, b1, acc[i][1]);
      acc[i][2] = _mm512_fmadd_ps(av, b2, acc[i][2]);
      acc[i][3] = _mm512_fmadd_ps(av, b3, acc[i][3]);
    }
  }
  for (int i = 0; i < kTileM; ++i) {
    float* crow = c + size_t(i0 + i) * n + j0;
    for (int v = 0; v < 4; ++v) {
      __m512 r = acc[i][v];
      if (beta1) r = _mm512_add_ps(r, _mm512_loadu_ps(crow + 16 * v));
      _mm512_storeu_ps(crow + 16 * v, r);
    }
  }
}
#endif

template <bool TransA>
inline void tile_scalar(const float* a, const float* b, float* c, int i0,
                        int j0, int ilim, int jlim, int m, int n, int k,
                        bool beta1) {
  for (int i = i0; i < ilim; ++i) {
    for (int j = j0; j < jlim; ++j) {
      float s = 0.0f;
      for (int kk = 0; kk < k; ++kk)
        s += a_elem<TransA>(a, i, kk, m, k) * b[size_t(kk) * n + j];
      float* cp = c + size_t(i) * n + j;
      *cp = beta1 ? *cp + s : s;
    }
  }
}

template <bool TransA>
void gemm_broadcast(const float* a, const float* b, float* c, int m, int n,
                    int k, bool beta1) {
  const int njt = (n + kTileN - 1) / kTileN;
  const int nit = (m + kTileM - 1) / kTileM;
#pragma omp parallel for collapse(2) schedule(static) \
    if (size_t(m) * n * k > 65536)
  for (int jt = 0; jt < njt; ++jt) {
    for (int it = 0; it < nit; ++it) {
      int j0 = jt * kTileN, i0 = it * kTileM;
      int jlim = std::min(j0 + kTileN, n), ilim = std::min(i0 + kTileM, m);
#if defined(__AVX512F__)
      if (jlim - j0 == kTileN && ilim - i0 == kTileM) {
        tile_4x64<TransA>(a, b, c, i0, j0, m, n, k, beta1);
        continue;
      }
#endif
      tile_scalar<TransA>(a, b, c, i0, j0, ilim, jlim, m, n, k, beta1);
    }
  }
}

}  // namespace

void gemm_nn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1) {
  gemm_broadcast<false>(a, b, c, m, n, k, beta1);
}

void gemm_tn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1) {
  gemm_broadcast<true>(a, b, c, m, n, k, beta1);
}

void gemm_nt(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1) {
#pragma omp parallel for schedule(static) if (size_t(m) * n * k > 65536)
  for (int i = 0; i < m; ++i) {
    const float* arow = a + size_t(i) * k;
    for (int j = 0; j < n; ++j) {
      const float* brow = b + size_t(j) * k;
      float s;
      int kk = 0;
#if defined(__AVX512F__)
      __m512 vacc = _mm512_setzero_ps();
      for (; kk + 16 <= k; kk += 16)
        vacc = _mm512_fmadd_ps(_mm512_loadu_ps(arow + kk),
                               _mm512_loadu_ps(brow + kk), vacc);
      s = _mm512_reduce_add_ps(vacc);
#else
      s = 0.0f;
#endif
      for (; kk < k; ++kk) s += arow[kk] * brow[kk];
      float* cp = c + size_t(i) * n + j;
      *cp = beta1 ? *cp + s : s;
    }
  }
}

// ---- conv lowering ----

void im2col_3x3(const float* in, float* col, int c, int h, int w) {
  const size_t plane = size_t(h) * w;
#pragma omp parallel for schedule(static) if (c * plane > 16384)
  for (int kc = 0; kc < c * 9; ++kc) {
    int ci = kc / 9, r = kc % 9;
    int dy = r / 3 - 1, dx = r % 3 - 1;
    const float* src = in + size_t(ci) * plane;
    float* dst = col + size_t(kc) * plane;
    for (int y = 0; y < h; ++y) {
      int sy = y + dy;
      float* drow = dst + size_t(y) * w;
      if (sy < 0 || sy >= h) {
        std::memset(drow, 0, sizeof(float) * w);
        continue;
      }
      const float* srow = src + size_t(sy) * w;
      if (dx == 0) {
        std::memcpy(drow, srow, sizeof(float) * w);
      } else if (dx == 1) {
        std::memcpy(drow, srow + 1, sizeof(float) * (w - 1));
        drow[w - 1] = 0.0f;
      } else {
        drow[0] = 0.0f;
        std::memcpy(drow + 1, srow, sizeof(float) * (w - 1));
      }
    }
  }
}

void col2im_3x3(const float* col, float* in, int c, int h, int w) {
  const size_t plane = size_t(h) * w;
#pragma omp parallel for schedule(static) if (c * plane > 16384)
  for (int ci = 0; ci < c; ++ci) {
    float* dst = in + size_t(ci) * plane;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        float s = 0.0f;
        for (int dy = -1; dy <= 1; ++dy) {
          int py = y - dy;
          if (py < 0 || py >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            int px = x - dx;
            if (px < 0 || px >= w) continue;
            int kc = ci * 9 + (dy + 1) * 3 + (dx + 1);
            s += col[size_t(kc) * plane + size_t(py) * w + px];
          }
        }
        dst[size_t(y) * w + x] = s;
      }
    }
  }
}

void im2col_1d3(const float* in, float* col, int c, int l) {
#pragma omp parallel for schedule(static) if (c * l > 16384)
  for (int kc = 0; kc < c * 3; ++kc) {
    int ci = kc / 3, d = kc % 3 - 1;
    const float* src = in + size_t(ci) * l;
    float* dst = col + size_t(kc) * l;
    for (int x = 0; x < l; ++x) {
      int sx = x + d;
      dst[x] = (sx >= 0 && sx < l) ? src[sx] : 0.0f;
    }
  }
}

void col2im_1d3(const float* col, float* in, int c, int l) {
#pragma omp parallel for schedule(static) if (c * l > 16384)
  for (int ci = 0; ci < c; ++ci) {
    float* dst = in + size_t(ci) * l;
    for (int x = 0; x < l; ++x) {
      float s = 0.0f;
      for (int d = -1; d <= 1; ++d) {
        int px = x - d;
        if (px < 0 || px >= l) continue;
        s += col[size_t(ci * 3 + d + 1) * l + px];
      }
      dst[x] = s;
    }
  }
}

// ---- resampling ----

void avgpool2x2(const float* in, float* out, int c, int h, int w) {
  int oh = h / 2, ow = w / 2;
#pragma omp parallel for schedule(static) if (size_t(c) * h * w > 16384)
  for (int ci = 0; ci < c; ++ci) {
    const float* src = in + size_t(ci) * h * w;
    float* dst = out + size_t(ci) * oh * ow;
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x)
        dst[size_t(y) * ow + x] =
            0.25f * (src[size_t(2 * y) * w + 2 * x] +
                     src[size_t(2 * y) * w + 2 * x + 1] +
                     src[size_t(2 * y + 1) * w + 2 * x] +
                     src[size_t(2 * y + 1) * w + 2 * x + 1]);
  }
}

void avgpool2x2_back(const float* dout, float* din, int c, int h, int w) {
  int oh = h / 2, ow = w / 2;
#pragma omp parallel for schedule(static) if (size_t(c) * h * w > 16384)
  for (int ci = 0; ci < c; ++ci) {
    const float* src = dout + size_t(ci) * oh * ow;
    float* dst = din + size_t(ci) * h * w;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        dst[size_t(y) * w + x] = 0.25f * src[size_t(y / 2) * ow + x / 2];
  }
}

void upsample2x(const float* in, float* out, int c, int h, int w) {
  int oh = h * 2, ow = w * 2;
#pragma omp parallel for schedule(static) if (size_t(c) * h * w > 16384)
  for (int ci = 0; ci < c; ++ci) {
    const float* src = in + size_t(ci) * h * w;
    float* dst = out + size_t(ci) * oh * ow;
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x)
        dst[size_t(y) * ow + x] = src[size_t(y / 2) * w + x / 2];
  }
}

void upsample2x_back(const float* dout, float* din, int c, int h, int w) {
  int oh = h * 2, ow = w * 2;
#pragma omp parallel for schedule(static) if (size_t(c) * h * w > 16384)
  for (int ci = 0; ci < c; ++ci) {
    const float* src = dout + size_t(ci) * oh * ow;
    float* dst = din + size_t(ci) * h * w;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        dst[size_t(y) * w + x] = src[size_t(2 * y) * ow + 2 * x] +
                                 src[size_t(2 * y) * ow + 2 * x + 1] +
                                 src[size_t(2 * y + 1) * ow + 2 * x] +
                                 src[size_t(2 * y + 1) * ow + 2 * x + 1];
  }
}

void avgpool1d2(const float* in, float* out, int c, int l) {
  int ol = l / 2;
  for (int ci = 0; ci < c; ++ci)
    for (int x = 0; x < ol; ++x)
      out[size_t(ci) * ol + x] = 0.5f * (in[size_t(ci) * l + 2 * x] +
                                         in[size_t(ci) * l + 2 * x + 1]);
}

void avgpool1d2_back(const float* dout, float* din, int c, int l) {
  int ol = l / 2;
  for (int ci = 0; ci < c; ++ci)
    for (int x = 0; x < l; ++x)
      din[size_t(ci) * l + x] = 0.5f * dout[size_t(ci) * ol + x / 2];
}

void upsample1d2(const float* in, float* out, int c, int l) {
  int ol = l * 2;
  for (int ci = 0; ci < c; ++ci)
    for (int x = 0; x < ol; ++x)
      out[size_t(ci) * ol + x] = in[size_t(ci) * l + x / 2];
}

void upsample1d2_back(const float* dout, float* din, int c, int l) {
  int ol = l * 2;
  for (int ci = 0; ci < c; ++ci)
    for (int x = 0; x < l; ++x)
      din[size_t(ci) * l + x] = dout[size_t(ci) * ol + 2 * x] +
                                dout[size_t(ci) * ol + 2 * x + 1];
}

// ---- elementwise ----

void leaky_relu(const float* x, float* y, size_t n, float slope) {
#pragma omp parallel for schedule(static) if (n > 16384)
  for (long i = 0; i < long(n); ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_back(const float* dy, const float* y, float* dx, size_t n,
                     float slope) {
#pragma omp parallel for schedule(static) if (n > 16384)
  for (long i = 0; i < long(n); ++i)
    dx[i] = y[i] > 0.0f ? dy[i] : slope * dy[i];
}

void add_bias_rows(float* out, const float* bias, int c, int p) {
#pragma omp parallel for schedule(static) if (size_t(c) * p > 16384)
  for (int ci = 0; ci < c; ++ci) {
    float b = bias[ci];
    float* row = out + size_t(ci) * p;
    for (int i = 0; i < p; ++i) row[i] += b;
  }
}

void bias_grad_rows(const float* dout, float* db, int c, int p, bool beta1) {
#pragma omp parallel for schedule(static) if (size_t(c) * p > 16384)
  for (int ci = 0; ci < c; ++ci) {
    const float* row = dout + size_t(ci) * p;
    double s = 0.0;
    for (int i = 0; i < p; ++i) s += row[i];
    db[ci] = beta1 ? db[ci] + float(s) : float(s);
  }
}

void axpy(float alpha, const float* x, float* y, size_t n) {
#pragma omp parallel for schedule(static) if (n > 16384)
  for (long i = 0; i < long(n); ++i) y[i] += alpha * x[i];
}

void scale(float* x, size_t n, float alpha) {
#pragma omp parallel for schedule(static) if (n > 16384)
  for (long i = 0; i < long(n); ++i) x[i] *= alpha;
}

// ---- reductions ----

double sum(const float* x, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const float* x, const float* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += double(x[i]) * y[i];
  return s;
}

double sum_sq(const float* x, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += double(x[i]) * x[i];
  return s;
}

double sum_abs_diff(const float* x, const float* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::fabs(double(x[i]) - y[i]);
  return s;
}

double sum_sq_diff(const float* x, const float* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = double(x[i]) - y[i];
    s += d * d;
  }
  return s;
}

// ---- neighborhood kernels ----

void sobel_mag(const float* img, float* mag, float* gx, float* gy, int h,
               int w) {
#pragma omp parallel for schedule(static) if (size_t(h) * w > 16384)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      size_t i = size_t(y) * w + x;
      if (y == 0 || y == h - 1 || x == 0 || x == w - 1) {
        mag[i] = gx[i] = gy[i] = 0.0f;
        continue;
      }
      const float* r0 = img + size_t(y - 1) * w + x;
      const float* r1 = img + size_t(y) * w + x;
      const float* r2 = img + size_t(y + 1) * w + x;
      float sx = (r0[1] + 2.0f * r1[1] + r2[1]) - (r0[-1] + 2.0f * r1[-1] + r2[-1]);
      float sy = (r2[-1] + 2.0f * r2[0] + r2[1]) - (r0[-1] + 2.0f * r0[0] + r0[1]);
      gx[i] = sx;
      gy[i] = sy;
      mag[i] = std::sqrt(sx * sx + sy * sy + 1e-12f);
    }
  }
}

void sobel_mag_back(const float* dmag, const float* gx, const float* gy,
                    float* dimg, int h, int w) {
  std::vector<float> ex(size_t(h) * w, 0.0f), ey(size_t(h) * w, 0.0f);
#pragma omp parallel for schedule(static) if (size_t(h) * w > 16384)
  for (long i = 0; i < long(size_t(h) * w); ++i) {
    float m = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + 1e-12f);
    ex[i] = dmag[i] * gx[i] / m;
    ey[i] = dmag[i] * gy[i] / m;
  }
  static const float wx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const float wy[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
#pragma omp parallel for schedule(static) if (size_t(h) * w > 16384)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float s = 0.0f;
      // gather from the interior sobel windows that read pixel (y, x)
      for (int dy = -1; dy <= 1; ++dy) {
        int cy = y - dy;
        if (cy < 1 || cy > h - 2) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          int cx = x - dx;
          if (cx < 1 || cx > w - 2) continue;
          size_t ci = size_t(cy) * w + cx;
          s += ex[ci] * wx[dy + 1][dx + 1] + ey[ci] * wy[dy + 1][dx + 1];
        }
      }
      dimg[size_t(y) * w + x] += s;
    }
  }
}

namespace {
inline int reflect_idx(int i, int n) {
  while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
  return i;
}

std::vector<double> gauss_taps(double sigma) {
  int radius = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double s = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    s += taps[i + radius];
  }
  for (double& t : taps) t /= s;
  return taps;
}
}  // namespace

void gaussian_blur(const float* in, float* out, int h, int w, double sigma) {
  if (sigma <= 0.0) {
    std::memcpy(out, in, sizeof(float) * size_t(h) * w);
    return;
  }
  auto taps = gauss_taps(sigma);
  int radius = int(taps.size() / 2);
  std::vector<float> tmp(size_t(h) * w);
#pragma omp parallel for schedule(static) if (size_t(h) * w > 16384)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d)
        s += taps[d + radius] * in[size_t(y) * w + reflect_idx(x + d, w)];
      tmp[size_t(y) * w + x] = float(s);
    }
#pragma omp parallel for schedule(static) if (size_t(h) * w > 16384)
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
#pragma omp parallel for schedule(static) if (size_t(h) * w > 16384)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0, s2 = 0.0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        int sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          int sx = x + dx;
          if (sx < 0 || sx >= w) continue;
          double v = img[size_t(sy) * w + sx];
          s += v;
          s2 += v * v;
          ++n;
        }
      }
      double mu = s / n;
      double var = std::max(0.0, s2 / n - mu * mu);
      mean[size_t(y) * w + x] = float(mu);
      stddev[size_t(y) * w + x] = float(std::sqrt(var));
    }
  }
}

}  // namespace ctstd::kern
