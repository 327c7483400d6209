#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace killing {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the 0-based character position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the domain of an elementary function.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the (open) domain of a metric, patch or curve.
class OutsideDomain : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil would leave the domain.
class InsufficientMargin : public Error {
 public:
  using Error::Error;
};

class InvalidData : public Error {
 public:
  using Error::Error;
};

class DegenerateImmersion : public Error {
 public:
  using Error::Error;
};

/// sin(phi) below the threshold: the adapted frame e1 = T/sin(phi) is undefined.
class AngleSingular : public Error {
 public:
  using Error::Error;
};

class NotCMC : public Error {
 public:
  NotCMC(double deviation, double tolerance)
      : Error("mean curvature is not constant: deviation " + std::to_string(deviation) +
              " exceeds " + std::to_string(tolerance)),
        deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

class ZeroGradR : public Error {
 public:
  using Error::Error;
};

/// |4r^2 - G| vanishes while grad r does not; no proper biharmonic CMC surface exists there.
class G4r2Degenerate : public Error {
 public:
  using Error::Error;
};

class NotArcLength : public Error {
 public:
  using Error::Error;
};

class DegenerateCurve : public Error {
 public:
  using Error::Error;
};

class NoRoot : public Error {
 public:
  using Error::Error;
};

}  // namespace killing
