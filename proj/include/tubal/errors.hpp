#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tubal {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands with incompatible or invalid dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A tube whose Fourier coefficients include a (near-)zero entry cannot be
// inverted; `coefficient()` is the first offending 0-based index.
class NotInvertibleError : public Error {
 public:
  NotInvertibleError(const std::string& what, std::ptrdiff_t coefficient)
      : Error(what), coefficient_(coefficient) {}
  std::ptrdiff_t coefficient() const { return coefficient_; }

 private:
  std::ptrdiff_t coefficient_;
};

// Normalization hit a Fourier slice with norm below tolerance.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, std::ptrdiff_t slice)
      : Error(what), slice_(slice) {}
  std::ptrdiff_t slice() const { return slice_; }

 private:
  std::ptrdiff_t slice_;
};

// Orthonormalization could not produce the next block (0-based block index).
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, std::ptrdiff_t block)
      : Error(what), block_(block) {}
  std::ptrdiff_t block() const { return block_; }

 private:
  std::ptrdiff_t block_;
};

// A triangular solve or dense factorization met a non-invertible pivot;
// `index()` is the 0-based diagonal position (or -1 when not applicable).
class SingularError : public Error {
 public:
  explicit SingularError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index_(index) {}
  std::ptrdiff_t index() const { return index_; }

 private:
  std::ptrdiff_t index_;
};

// Input to an inverse transform lacked the conjugate symmetry a real
// result requires.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

// An internal cross-check failed (e.g. imaginary residue after an inverse
// transform that should have produced a real tensor).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A brute-force reference path was asked to handle a problem above its
// hard size cap.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

// Malformed file, wrong payload size, or unreadable path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tubal
