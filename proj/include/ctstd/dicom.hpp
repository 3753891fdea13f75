#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctstd/tensor.hpp"

namespace ctstd::dicom {

/// Slice metadata needed for HU conversion plus the acquisition fields the
/// rest of the pipeline cares about.
struct CtSliceMeta {
  uint32_t rows = 0;
  uint32_t cols = 0;
  int bits_allocated = 16;  // 8 or 16
  int pixel_representation = 0;  // 0 unsigned, 1 signed
  float rescale_slope = 1.0f;
  float rescale_intercept = 0.0f;
  std::optional<float> slice_thickness;
  std::optional<std::string> convolution_kernel;
};

/// Parses a DICOM Part-10 file (Explicit VR Little Endian, uncompressed
/// pixel data) into metadata and an HU-valued 2-D tensor. Unknown tags are
/// skipped, including sequences. Truncated input raises FormatError; any
/// transfer syntax other than Explicit VR LE raises UnsupportedError.
std::pair<CtSliceMeta, Tensor> parse_dicom(const uint8_t* data, size_t len);

std::pair<CtSliceMeta, Tensor> parse_dicom_file(const std::string& path);

/// Emits a minimal but standard-conforming Part-10 file such that
/// parse_dicom(write_minimal_dicom(m, img)) reproduces (m, img) up to f32
/// rounding. img must be 2-D with unit HU and values representable in the
/// stored integer width after inverse rescale.
std::vector<uint8_t> write_minimal_dicom(const CtSliceMeta& meta,
                                         const Tensor& img);

}  // namespace ctstd::dicom
