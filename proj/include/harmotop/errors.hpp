#pragma once

#include <stdexcept>
#include <string>

namespace harmotop {

/// Base for results that could not be numerically certified. The CLI maps
/// these to exit code 3.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A counting or norm computation could not bound the tail of mu_k beyond
/// the last evaluated degree.
class TailNotCertified : public CertificationError {
 public:
  using CertificationError::CertificationError;
};

/// Two consecutive quadrature refinements disagreed beyond tolerance.
class QuadratureDivergence : public CertificationError {
 public:
  using CertificationError::CertificationError;
};

}  // namespace harmotop
