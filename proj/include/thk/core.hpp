#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace thk {

using cplx = std::complex<double>;
using Polyline = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  DomainError,
  RangeOverflow,
  NumericalFailure,
  BoundaryBranchPoint,
  CriticalCollision,
  LiftDiverged,
  InvalidQuadrilateral,
  NotQuasiconformalAt,
  Unsupported,
  DegeneratePath,
  RegularityHypothesisFailed,
  InsufficientData,
  SingularCollision,
  MaxIterExceeded,
  VerificationFailed,
  NotFound,
  InvalidConfig,
};

const char* to_string(ErrorKind k);

// Base of every error the library throws. `where` and `value` carry the
// payload some kinds need (attempted exponent, failure time, location).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg, cplx where = {}, double value = 0.0)
      : std::runtime_error(msg), kind_(kind), where_(where), value_(value) {}
  ErrorKind kind() const { return kind_; }
  cplx where() const { return where_; }
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  cplx where_;
  double value_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg, cplx where = {}, double value = 0.0);

// Principal argument folded into [0, pi].
double angle_gap(double a, double b);

// Representation m * exp(e) of a complex number whose modulus may not fit a double.
struct Scaled {
  cplx m;
  double e = 0.0;

  cplx value() const;  // throws RangeOverflow
  cplx log() const;    // principal log of m plus e
  double log_abs() const;
};

std::string fmt_cplx(cplx z);

}  // namespace thk
