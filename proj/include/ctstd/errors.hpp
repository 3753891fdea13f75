#pragma once

#include <stdexcept>
#include <string>

namespace ctstd {

// Error taxonomy shared by all modules. The CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or truncated on-disk data (CTTN/CTCK/DICOM/PNG).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// A value or argument violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Tensor rank/dimension mismatch.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Recognized but unsupported input variant (e.g. compressed DICOM).
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// Training diverged (non-finite loss or gradient).
class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& msg) : Error(msg) {}
};

// Reverse-diffusion produced a non-finite intermediate.
class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& msg) : Error(msg) {}
};

// A frozen component was mutated.
class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& msg) : Error(msg) {}
};

}  // namespace ctstd
