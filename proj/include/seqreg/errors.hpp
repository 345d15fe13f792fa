#pragma once

#include <stdexcept>
#include <string>

namespace seqreg {

/// Malformed or inconsistent input files.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed (e.g. a covariance lost positive definiteness).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace seqreg
