#pragma once

#include <stdexcept>
#include <string>

namespace chromoseg {

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a documented invariant (bad label, wrong shape, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// File could not be opened, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chromoseg
