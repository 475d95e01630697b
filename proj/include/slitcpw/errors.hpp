#pragma once

#include <stdexcept>
#include <string>

namespace slitcpw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or physical-domain constraint was violated by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-convergence, singular system, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace slitcpw
