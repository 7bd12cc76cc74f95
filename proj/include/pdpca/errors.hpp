#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdpca {

enum class ErrorKind {
  Dimension,   // shape mismatch between operands
  Capacity,    // dense allocation above the configured cap
  Numerical,   // iteration failed to converge
  Degenerate,  // vector collapsed to (near) zero norm
  Precondition,
  Config,
  Spectrum,    // eigenvalue hypothesis violated (ties, non-positive, ...)
  Domain,      // scalar argument outside a function's domain
  Stream,      // batch provider could not serve a request
  Coverage,    // trace too short for a schedule
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Same kind, message prefixed with `context: `.
  Error with_context(std::string_view context) const;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace pdpca
