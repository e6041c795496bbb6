#include "thk/core.hpp"

#include <cmath>
#include <cstdio>

namespace thk {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::RangeOverflow: return "RangeOverflow";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::BoundaryBranchPoint: return "BoundaryBranchPoint";
    case ErrorKind::CriticalCollision: return "CriticalCollision";
    case ErrorKind::LiftDiverged: return "LiftDiverged";
    case ErrorKind::InvalidQuadrilateral: return "InvalidQuadrilateral";
    case ErrorKind::NotQuasiconformalAt: return "NotQuasiconformalAt";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::DegeneratePath: return "DegeneratePath";
    case ErrorKind::RegularityHypothesisFailed: return "RegularityHypothesisFailed";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularCollision: return "SingularCollision";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& msg, cplx where, double value) {
  throw Error(kind, std::string(to_string(kind)) + ": " + msg, where, value);
}

double angle_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), kTwoPi);
  return d > kPi ? kTwoPi - d : d;
}

cplx Scaled::value() const {
  if (m == cplx{}) return {};
  double la = std::log(std::abs(m)) + e;
  if (!(la < 709.0)) fail(ErrorKind::RangeOverflow, "modulus exp(" + std::to_string(la) + ") not representable", {}, la);
  return m * std::exp(e);
}

cplx Scaled::log() const {
  if (m == cplx{}) fail(ErrorKind::DomainError, "log of zero");
  return std::log(m) + e;
}

double Scaled::log_abs() const {
  if (m == cplx{}) return -INFINITY;
  return std::log(std::abs(m)) + e;
}

std::string fmt_cplx(cplx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

}  // namespace thk
