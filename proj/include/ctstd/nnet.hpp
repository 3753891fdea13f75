#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctstd/io.hpp"
#include "ctstd/rng.hpp"
#include "ctstd/tensor.hpp"

namespace ctstd::nn {

constexpr float kLeakySlope = 0.01f;

/// Named parameter tensors with their gradients and Adam state.
struct ParamStore {
  struct Entry {
    std::string name;
    std::vector<uint32_t> shape;
    std::vector<float> value, grad, m, v;
    size_t size() const { return value.size(); }
  };

  std::vector<Entry> entries;
  int64_t step = 0;

  /// Registers a tensor. fan_in > 0 draws LeCun-uniform values from rng;
  /// fan_in == 0 or rng == nullptr zero-initializes (biases, test nets).
  int add(const std::string& name, std::vector<uint32_t> shape, Rng* rng,
          int fan_in);

  Entry& at(int id) { return entries[size_t(id)]; }
  const Entry& at(int id) const { return entries[size_t(id)]; }
  int find(const std::string& name) const;

  void zero_grad();

  /// Bias-corrected Adam update over every entry; increments the shared
  /// step counter. Non-finite gradients raise TrainingError.
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

  double sum_sq_values() const;
  /// grad += 2*lambda*value (the L2 term of the training loss).
  void add_l2_grad(double lambda);

  Checkpoint to_checkpoint() const;
  /// Fills values from checkpoint entries matched by name; shapes must
  /// agree and every parameter must be present.
  void load(const Checkpoint& ckpt);
};

/// Shared architecture description for the three networks.
struct NetConfig {
  int image_size = 128;
  int latent_dim = 128;
  std::vector<int> enc_widths = {16, 32, 64, 128, 256};
  std::vector<int> den_widths = {32, 64, 128};
  int time_dim = 64;
  int max_t = 200;

  void validate_codec() const;     // image/latent constraints
  void validate_denoiser() const;  // latent divisibility by 8
  int grid() const { return image_size >> int(enc_widths.size()); }
};

// Layer handle types used internally by the networks.
struct ConvIds { int w = -1, b = -1; };

/// Five stride-2 blocks (3x3 conv x2 + leaky + avgpool) followed by a dense
/// head onto the latent vector.
class Encoder {
 public:
  Encoder(ParamStore& ps, const NetConfig& cfg, Rng* init_rng);

  struct Ctx {
    int n = 0;
    std::vector<std::vector<float>> a1, a2, pooled;  // per block, batched
    std::vector<float> input, flat;
  };

  /// imgs: [n, size*size] row-major; latents out: [n, latent_dim].
  void forward(const ParamStore& ps, const float* imgs, int n, float* latents,
               Ctx& ctx) const;
  /// dlatents: [n, latent_dim]; accumulates parameter gradients; optionally
  /// produces input gradients in dimgs ([n, size*size], may be null).
  void backward(ParamStore& ps, const Ctx& ctx, const float* dlatents,
                float* dimgs) const;

  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  std::vector<ConvIds> conv1_, conv2_;
  ConvIds head_;
};

/// Dense seed grid plus five (upsample x2 + 3x3 conv x2) blocks and a
/// kernel-size-1 output head; no encoder skip connections.
class Decoder {
 public:
  Decoder(ParamStore& ps, const NetConfig& cfg, Rng* init_rng);

  struct Ctx {
    int n = 0;
    std::vector<float> z, seed;                      // dense output (post-leaky)
    std::vector<std::vector<float>> up, a1, a2;      // per block
    std::vector<float> h1;                           // head mid activation
  };

  void forward(const ParamStore& ps, const float* latents, int n, float* imgs,
               Ctx& ctx) const;
  void backward(ParamStore& ps, const Ctx& ctx, const float* dimgs,
                float* dlatents) const;

  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  ConvIds dense_;
  std::vector<ConvIds> conv1_, conv2_;  // per up block
  ConvIds head1_, head2_;
  std::vector<int> in_ch_, out_ch_;
};

/// 1-D conditional U-Net over latent vectors: channels (noisy, condition),
/// sinusoidal time embedding added after the first layer, three down / three
/// up conv blocks with additive skips.
class Denoiser {
 public:
  Denoiser(ParamStore& ps, const NetConfig& cfg, Rng* init_rng);

  struct Ctx {
    int n = 0;
    std::vector<float> temb, tproj;
    std::vector<std::vector<float>> acts;  // flat list, indices fixed by impl
  };

  /// z_noisy/z_cond: [n, latent]; t: per-sample step index in [1, max_t].
  void forward(const ParamStore& ps, const float* z_noisy, const float* z_cond,
               const int* t, int n, float* out, Ctx& ctx) const;
  void backward(ParamStore& ps, const Ctx& ctx, const float* dout,
                float* dz_noisy, float* dz_cond) const;

  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  ConvIds cin_, tproj_, d1_, d2a_, d2b_, d3a_, d3b_, mid_, u3a_, u3b_, u2_,
      u1_, head_;
};

/// Sinusoidal step embedding (half sine, half cosine).
void time_embedding(int t, int dim, float* out);

}  // namespace ctstd::nn
