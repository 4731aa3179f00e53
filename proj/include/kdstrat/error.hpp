#pragma once

#include <stdexcept>
#include <string>

namespace kdstrat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when caller-supplied parameters violate a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A randomly constructed geometry turned out degenerate (e.g. collinear sites).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

}  // namespace kdstrat
