#pragma once

#include <stdexcept>
#include <string>

namespace glyphforge {

// Input failed a contract check. `path` names the offending field when known
// (e.g. "text_regions[0].font_size_ratio").
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Input is well-formed but carries no usable signal (constant image, empty canvas...).
class DegenerateInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A pluggable backend (VLM, refiner, scorer) failed or is not configured.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace glyphforge
