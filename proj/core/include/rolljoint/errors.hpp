#pragma once

#include <stdexcept>
#include <string>

namespace rolljoint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contact parameter fell outside its surface's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A tendon segment collapsed to (near) zero length, so its direction is undefined.
class DegenerateTendon : public Error {
 public:
  using Error::Error;
};

/// A block matrix of the recursive Newton system is singular or too badly conditioned.
class SingularBlock : public Error {
 public:
  using Error::Error;
};

/// The dense oracle's finite-difference Jacobian is singular.
class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class UnsupportedLoad : public Error {
 public:
  using Error::Error;
};

/// Malformed design or scenario input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rolljoint
