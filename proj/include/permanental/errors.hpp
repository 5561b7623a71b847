#pragma once

#include <stdexcept>
#include <string>

namespace perm {

/// Base class for every error raised by the library.
///
/// `is_validation()` separates bad input (the matrix is not an M-matrix, a
/// precondition does not hold) from numerical failure inside the library.
/// The CLI maps the first kind to exit status 2 and the second to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool is_validation() const { return true; }
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(double pivot)
      : Error("matrix is singular (smallest pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
  double pivot() const { return pivot_; }

 private:
  double pivot_;
};

enum class NotMReason { PositiveOffDiagonal, Singular, NegativeInverse, NonPositiveDiagonal, NotSquare };

inline const char* to_string(NotMReason r) {
  switch (r) {
    case NotMReason::PositiveOffDiagonal: return "positive off-diagonal entry";
    case NotMReason::Singular: return "singular";
    case NotMReason::NegativeInverse: return "inverse has a negative entry";
    case NotMReason::NonPositiveDiagonal: return "non-positive diagonal entry";
    case NotMReason::NotSquare: return "not square";
  }
  return "unknown";
}

class NotMMatrix : public Error {
 public:
  NotMMatrix(NotMReason reason, int row, int col, double value)
      : Error(std::string("not a nonsingular M-matrix: ") + to_string(reason) + " at (" +
              std::to_string(row) + "," + std::to_string(col) + ") value " + std::to_string(value)),
        reason_(reason), row_(row), col_(col), value_(value) {}
  NotMReason reason() const { return reason_; }
  int row() const { return row_; }
  int col() const { return col_; }
  double value() const { return value_; }

 private:
  NotMReason reason_;
  int row_, col_;
  double value_;
};

class DimensionTooLarge : public Error {
 public:
  DimensionTooLarge(long requested, long cap)
      : Error("dimension " + std::to_string(requested) + " exceeds cap " + std::to_string(cap)),
        requested_(requested), cap_(cap) {}
  long requested() const { return requested_; }
  long cap() const { return cap_; }

 private:
  long requested_, cap_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last)
      : Error(what + " did not converge (last iterate " + std::to_string(last) + ")"), last_(last) {}
  double last() const { return last_; }
  bool is_validation() const override { return false; }

 private:
  double last_;
};

class TruncationInfeasible : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class HypothesisFailed : public Error {
 public:
  HypothesisFailed(int row, const std::string& why)
      : Error("hypothesis fails at row " + std::to_string(row) + ": " + why), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

class AsymmetryTooLarge : public Error {
 public:
  explicit AsymmetryTooLarge(double minimal_c)
      : Error("asymmetry condition needs C = " + std::to_string(minimal_c) + ", not < 1"),
        minimal_c_(minimal_c) {}
  double minimal_c() const { return minimal_c_; }

 private:
  double minimal_c_;
};

class NotConstantDiagonal : public Error {
 public:
  using Error::Error;
};

class DegenerateSigma : public Error {
 public:
  DegenerateSigma(int i, int j)
      : Error("sigma^2 vanishes at (" + std::to_string(i) + "," + std::to_string(j) +
              ") with nonzero asymmetry") {}
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class NotTransient : public Error {
 public:
  explicit NotTransient(double radius)
      : Error("chain is not transient (spectral radius " + std::to_string(radius) + ")"),
        radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double residual)
      : Error(what + " (residual estimate " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }
  bool is_validation() const override { return false; }

 private:
  double residual_;
};

class NotIntegrable : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

}  // namespace perm
