#pragma once

#include <stdexcept>
#include <string>

namespace wvdnet {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (shape, range, parity...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or missing input data: WAV chunks, manifests, stores, checkpoints.
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad command line or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace wvdnet
