#pragma once

#include <cstddef>
#include <cstdint>

// Low-level compute kernels. All kernels are deterministic by construction:
// every output element is produced by exactly one thread and reductions run
// in a fixed index order, so results are bit-identical regardless of the
// OpenMP thread count. A naive serial implementation of each kernel lives in
// kern::ref (kernels_ref.hpp) and is compared against these in the tests and
// in the bench_kernels tool.
namespace ctstd::kern {

// ---- GEMM family (row-major) ----

/// C[M,N] = A[M,K] * B[K,N]; accumulates into C when beta1 is true.
void gemm_nn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1 = false);

/// C[M,N] = A'[K,M]^T * B[K,N] (a passed in [K,M] layout).
void gemm_tn(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1 = false);

/// C[M,N] = A[M,K] * B[N,K]^T (dot-product kernel).
void gemm_nt(const float* a, const float* b, float* c, int m, int n, int k,
             bool beta1 = false);

// ---- Convolution lowering (3x3, pad 1, stride 1) ----

/// in [C,H,W] -> col [9C, H*W]; row (c*9 + (dy+1)*3 + dx+1) holds the
/// (dy,dx)-shifted image plane, zero outside.
void im2col_3x3(const float* in, float* col, int c, int h, int w);

/// Adjoint of im2col_3x3: col [9C, H*W] -> in [C,H,W] (gather, no races).
void col2im_3x3(const float* col, float* in, int c, int h, int w);

/// 1-D variants (kernel 3, pad 1, stride 1) over [C, L].
void im2col_1d3(const float* in, float* col, int c, int l);
void col2im_1d3(const float* col, float* in, int c, int l);

// ---- Resampling ----

void avgpool2x2(const float* in, float* out, int c, int h, int w);
void avgpool2x2_back(const float* dout, float* din, int c, int h, int w);
void upsample2x(const float* in, float* out, int c, int h, int w);  // in is [c,h,w]
void upsample2x_back(const float* dout, float* din, int c, int h, int w);

void avgpool1d2(const float* in, float* out, int c, int l);
void avgpool1d2_back(const float* dout, float* din, int c, int l);
void upsample1d2(const float* in, float* out, int c, int l);
void upsample1d2_back(const float* dout, float* din, int c, int l);

// ---- Elementwise / bias ----

void leaky_relu(const float* x, float* y, size_t n, float slope);
/// Backward using the forward *output* sign (valid for slope > 0).
void leaky_relu_back(const float* dy, const float* y, float* dx, size_t n,
                     float slope);

void add_bias_rows(float* out, const float* bias, int c, int p);
void bias_grad_rows(const float* dout, float* db, int c, int p, bool beta1);

void axpy(float alpha, const float* x, float* y, size_t n);
void scale(float* x, size_t n, float alpha);

// ---- Reductions (double accumulators, fixed order) ----

double sum(const float* x, size_t n);
double dot(const float* x, const float* y, size_t n);
double sum_sq(const float* x, size_t n);
double sum_abs_diff(const float* x, const float* y, size_t n);
double sum_sq_diff(const float* x, const float* y, size_t n);

// ---- Image neighborhood kernels ----

/// Sobel gradient magnitude on interior pixels; border set to zero.
/// gx/gy caches are required by the backward pass.
void sobel_mag(const float* img, float* mag, float* gx, float* gy, int h,
               int w);
/// Chain rule through sobel_mag: accumulates d(loss)/d(img) into dimg.
void sobel_mag_back(const float* dmag, const float* gx, const float* gy,
                    float* dimg, int h, int w);

/// Separable Gaussian blur, reflect boundary; sigma <= 0 copies input.
void gaussian_blur(const float* in, float* out, int h, int w, double sigma);

/// Per-pixel mean and population std over a 3x3 window (shrunk at edges).
void window_mean_std_3x3(const float* img, float* mean, float* stddev, int h,
                         int w);

}  // namespace ctstd::kern
