#pragma once

#include <stdexcept>
#include <string>

namespace ncdm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation was violated
/// (bad cardinality, out-of-range parameter, malformed input file).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The inputs are well-formed but the requested quantity is undefined
/// for them, e.g. a zero NCD denominator or a separator collision.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A compressor backend could not be run (missing external command,
/// library failure).
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

/// Filesystem problems while loading a corpus or image.
class LoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncdm
