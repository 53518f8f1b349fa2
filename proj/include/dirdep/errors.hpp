#pragma once

#include <stdexcept>
#include <string>

namespace dirdep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data: wrong dimensions, non-finite values, rows off the sphere.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration (kernel exponent, B, model spec, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A marginal sample carries no spread, so a normalized statistic is undefined.
class DegenerateMarginal : public Error {
 public:
  using Error::Error;
};

/// A random generator failed to produce a draw (rejection budget exhausted).
class SamplerError : public Error {
 public:
  using Error::Error;
};

}  // namespace dirdep
