#pragma once

#include <stdexcept>
#include <string>

namespace tidal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// g_ij y^i y^j vanished within tolerance; ‖y‖ and everything built on it is undefined.
class NullFiberError : public Error {
 public:
  using Error::Error;
};

/// Base point outside the chart domain of a field (horizon, axis, singularity).
class ChartError : public Error {
 public:
  using Error::Error;
};

/// Tensor slot, variance or frame misuse.
class TensorError : public Error {
 public:
  using Error::Error;
};

/// Bad catalog name or unphysical parameters.
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// Operation requested outside its supported scope (e.g. classical deviation on a curved metric).
class ScopeError : public Error {
 public:
  using Error::Error;
};

/// Scenario file failed to parse or validate. `field()` names the offending JSON path.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace tidal
