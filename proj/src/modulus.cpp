#include "thk/modulus.hpp"

#include <cmath>

#include "thk/core.hpp"

namespace thk {

double annulus_modulus(double r, double R) {
  if (!(r > 0.0) || !(R > r)) fail(ErrorKind::DomainError, "annulus needs 0 < r < R", {r, R});
  return std::log(R / r);
}

double agm(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::DomainError, "agm of nonpositive argument", {a, b});
  for (int i = 0; i < 64 && std::fabs(a - b) > 1e-16 * a; ++i) {
    double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

double ellip_k(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) fail(ErrorKind::DomainError, "ellip_k needs 0 <= k < 1", {}, k);
  return kPi / (2.0 * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))));
}

double grotzsch_mu(double r) {
  if (!(r > 0.0) || !(r < 1.0)) fail(ErrorKind::DomainError, "grotzsch_mu needs 0 < r < 1", {}, r);
  double rp = std::sqrt((1.0 - r) * (1.0 + r));
  return 0.5 * kPi * agm(1.0, rp) / agm(1.0, r);
}

}  // namespace thk
