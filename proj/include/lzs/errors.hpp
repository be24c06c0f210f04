#pragma once

#include <stdexcept>
#include <string>

namespace lzs {

/// Invalid input: a parameter outside its domain or an inconsistent setup.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure during time propagation (step underflow, norm drift, ...).
class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, double time_fs)
      : std::runtime_error(what + " at t=" + std::to_string(time_fs) + " fs"),
        time_(time_fs) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// k0 window too small: residual population has not decayed at the edges.
class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint belongs to a different configuration or is corrupt.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lzs
