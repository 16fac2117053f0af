#pragma once

#include <stdexcept>
#include <string>

namespace cldmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable or malformed at the byte level.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Readable file in a format or sub-format the decoder does not handle.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Zero-sized image or mismatched dimensions between layers.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid analysis parameters (thresholds, direction count, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Data for which the statistics are undefined: an all-black image
/// (zero global mean) or a field with no defined pixel.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A ray walk requested past the image border.
class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

}  // namespace cldmap
