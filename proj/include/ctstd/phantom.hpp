#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctstd/tensor.hpp"

namespace ctstd::phantom {

/// Reconstruction-kernel emulation: a radially symmetric MTF applied in the
/// frequency domain plus correlated quantum noise shaped by the same MTF.
/// The MTF is flat up to `cutoff` (cycles/pixel); smooth kernels roll off
/// beyond it, sharp kernels boost a band centered on it. cutoff = 0.5 with
/// boost = 0 and noise_sigma = 0 is the exact identity.
struct KernelSpec {
  std::string name;
  enum class Mtf { Smooth, Sharp } mtf_shape = Mtf::Smooth;
  float cutoff = 0.25f;      // cycles/pixel, 0 < cutoff <= 0.5
  float boost = 0.0f;        // mid-band gain for sharp kernels
  float noise_sigma = 0.0f;  // HU std of injected correlated noise

  void validate() const;
};

/// Preset emulating a soft-tissue (smooth) reconstruction kernel.
KernelSpec smooth_kernel();
/// Preset emulating an edge-enhancing (sharp) reconstruction kernel.
KernelSpec sharp_kernel();

/// (non-standard A, standard B) training pair over a shared base phantom.
struct PairedSample {
  Tensor a;  // smooth-kernel rendering
  Tensor b;  // sharp-kernel rendering
  std::vector<RoiMask> tumor_rois;
};

/// Deterministic chest phantom: body ellipse around +50 HU, lung fields
/// around -850 HU with correlated texture, and n_tumors heterogeneous
/// soft-tissue blobs (around +20 HU) inside the lungs. Returns the phantom
/// and one ROI mask per tumor (each >= 16 pixels).
std::pair<Tensor, std::vector<RoiMask>> gen_ct_phantom(uint64_t seed, int size,
                                                       int n_tumors);

/// Frequency-domain kernel emulation; deterministic given noise_seed.
Tensor apply_kernel(const Tensor& img, const KernelSpec& k, uint64_t noise_seed);

/// n paired samples with per-sample derived seeds; B uses the sharp preset
/// (standard), A the smooth one (non-standard).
std::vector<PairedSample> gen_paired_dataset(uint64_t seed, int n, int size);

/// Binary flow map with the two-letter logo glyph (flow 1 inside strokes).
/// Deterministic; takes no seed.
Tensor gen_uk_phantom(int size);

/// Gated speckle stack [gates, H, W]: per gate the flow map is blurred by
/// depth_blur px (photon diffusion), multiplied by unit-mean gamma speckle
/// (shape gamma_shape; 0 disables) and offset by additive read noise
/// (read_sigma; 0 disables), clamped non-negative.
Tensor simulate_gated_speckle(const Tensor& flow, int gates, double depth_blur,
                              uint64_t seed, double gamma_shape = 4.0,
                              double read_sigma = 0.02);

}  // namespace ctstd::phantom
