// Timing comparison between the optimized OpenMP kernels and the serial
// reference implementations. Build target: `cmake --build build -t bench`.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ctstd/kernels.hpp"
#include "ctstd/kernels_ref.hpp"
#include "ctstd/rng.hpp"

using namespace ctstd;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void row(const char* name, double flops, double t_opt, double t_ref) {
  std::printf("%-28s %9.3f ms %9.3f ms  x%-6.1f %8.2f GFLOP/s\n", name,
              t_opt * 1e3, t_ref * 1e3, t_ref / t_opt,
              flops > 0 ? flops / t_opt / 1e9 : 0.0);
}

std::vector<float> random_vec(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (float& x : v) x = float(rng.uniform(-1.0, 1.0));
  return v;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled\n");
#endif
  std::printf("%-28s %12s %12s %8s %16s\n", "kernel", "optimized", "serial",
              "speedup", "throughput");

  // conv-shaped GEMMs (per-sample lowered 3x3 convolutions)
  struct Shape { int m, n, k; const char* name; };
  Shape shapes[] = {
      {16, 16384, 144, "gemm_nn 16x16384x144"},
      {64, 4096, 576, "gemm_nn 64x4096x576"},
      {256, 64, 2304, "gemm_nn 256x64x2304"},
  };
  for (auto& s : shapes) {
    auto a = random_vec(size_t(s.m) * s.k, 1);
    auto b = random_vec(size_t(s.k) * s.n, 2);
    std::vector<float> c(size_t(s.m) * s.n);
    double flops = 2.0 * s.m * s.n * s.k;
    double t_opt = time_of(
        [&] { kern::gemm_nn(a.data(), b.data(), c.data(), s.m, s.n, s.k); }, 5);
    double t_ref = time_of(
        [&] { kern::ref::gemm_nn(a.data(), b.data(), c.data(), s.m, s.n, s.k); },
        2);
    row(s.name, flops, t_opt, t_ref);
  }

  {
    int cin = 16, cout = 16, h = 128, w = 128;
    auto in = random_vec(size_t(cin) * h * w, 3);
    auto wt = random_vec(size_t(cout) * cin * 9, 4);
    std::vector<float> col(size_t(cin) * 9 * h * w), out(size_t(cout) * h * w);
    double flops = 2.0 * cout * h * w * cin * 9;
    double t_opt = time_of(
        [&] {
          kern::im2col_3x3(in.data(), col.data(), cin, h, w);
          kern::gemm_nn(wt.data(), col.data(), out.data(), cout, h * w, cin * 9);
        },
        5);
    double t_ref = time_of(
        [&] { kern::ref::conv2d_3x3(in.data(), wt.data(), out.data(), cin, cout, h, w); },
        2);
    row("conv 3x3 16->16 @128^2", flops, t_opt, t_ref);
  }

  {
    int h = 512, w = 512;
    auto img = random_vec(size_t(h) * w, 5);
    std::vector<float> mean(size_t(h) * w), sd(size_t(h) * w);
    double t_opt = time_of(
        [&] { kern::window_mean_std_3x3(img.data(), mean.data(), sd.data(), h, w); },
        5);
    double t_ref = time_of(
        [&] { kern::ref::window_mean_std_3x3(img.data(), mean.data(), sd.data(), h, w); },
        5);
    row("window stats 3x3 @512^2", 0, t_opt, t_ref);
  }

  {
    int h = 512, w = 512;
    auto img = random_vec(size_t(h) * w, 6);
    std::vector<float> out(size_t(h) * w);
    double t_opt =
        time_of([&] { kern::gaussian_blur(img.data(), out.data(), h, w, 2.0); }, 5);
    double t_ref = time_of(
        [&] { kern::ref::gaussian_blur(img.data(), out.data(), h, w, 2.0); }, 5);
    row("gaussian blur s=2 @512^2", 0, t_opt, t_ref);
  }

  {
    int h = 512, w = 512;
    auto img = random_vec(size_t(h) * w, 7);
    std::vector<float> mag(size_t(h) * w), gx(size_t(h) * w), gy(size_t(h) * w);
    double t_opt = time_of(
        [&] { kern::sobel_mag(img.data(), mag.data(), gx.data(), gy.data(), h, w); },
        5);
    double t_ref =
        time_of([&] { kern::ref::sobel_mag(img.data(), mag.data(), h, w); }, 5);
    row("sobel magnitude @512^2", 0, t_opt, t_ref);
  }

  return 0;
}
