#pragma once

#include <stdexcept>
#include <string>

namespace mqthom {

// All failures of the exact engine derive from this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

class WeightClash : public Error {
 public:
  using Error::Error;
};

class WeightNotPreserved : public Error {
 public:
  using Error::Error;
};

class NotSkew : public Error {
 public:
  using Error::Error;
};

class NotOrthogonal : public Error {
 public:
  using Error::Error;
};

class NotInvolution : public Error {
 public:
  using Error::Error;
};

class DegreeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidSplit : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace mqthom
