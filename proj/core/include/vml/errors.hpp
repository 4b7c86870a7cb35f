#pragma once

#include <stdexcept>
#include <string>

namespace vml {

// Configuration / schema problems. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical / module-level failures. The CLI maps these to exit code 3.
class ModuleError : public std::runtime_error {
 public:
  explicit ModuleError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidLawError : public ModuleError {
 public:
  using ModuleError::ModuleError;
};

class UnsupportedClosedFormError : public ModuleError {
 public:
  using ModuleError::ModuleError;
};

class ResolutionError : public ModuleError {
 public:
  using ModuleError::ModuleError;
};

class NotPositiveDefiniteError : public ModuleError {
 public:
  using ModuleError::ModuleError;
};

class IndexError : public ModuleError {
 public:
  using ModuleError::ModuleError;
};

class RejectedInputError : public ModuleError {
 public:
  using ModuleError::ModuleError;
};

}  // namespace vml
