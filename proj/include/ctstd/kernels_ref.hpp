#pragma once

#include <cstddef>

// Serial reference implementations: straight loops, no tiling, no OpenMP.
// These exist to pin down the semantics of the optimized kernels; tests
// compare the two and bench_kernels reports the speed difference.
namespace ctstd::kern::ref {

void gemm_nn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1 = false);
void gemm_tn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1 = false);
void gemm_nt(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1 = false);

/// Direct 3x3 convolution (pad 1, stride 1): out[co] = sum_ci w[co,ci] * in[ci].
/// Weights laid out [Cout, Cin, 3, 3]; equals im2col_3x3 + gemm_nn.
void conv2d_3x3(const float* in, const float* w, float* out, int cin, int cout,
                int h, int wid);

void avgpool2x2(const float* in, float* out, int c, int h, int w);
void upsample2x(const float* in, float* out, int c, int h, int w);

void sobel_mag(const float* img, float* mag, int h, int w);
void gaussian_blur(const float* in, float* out, int h, int w, double sigma);
void window_mean_std_3x3(const float* img, float* mean, float* stddev, int h,
                         int w);

}  // namespace ctstd::kern::ref
