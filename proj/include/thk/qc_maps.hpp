#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thk/core.hpp"

namespace thk {

// Explicit quasiconformal self-maps of the plane. Every map knows its inverse,
// so conjugates and compositions stay explicit.
class QcMap {
 public:
  struct Impl;

  static QcMap identity();
  // z |z|^{a-1} on rho <= |z| <= 1 with a = log t / log rho, linear inside, identity outside.
  static QcMap radial_stretch(double rho, double t);
  // Identity for |z| >= R, z (|z|/R)^{a-1} for r_in <= |z| <= R, linear inside.
  static QcMap radial_power(double r_in, double R, double a);
  // Identity on |z| <= r, rotation by theta on |z| >= R, angle linear in log|z| between.
  static QcMap annulus_twist(double theta, double r, double R);
  // Moves a to b inside the disk of the given radius, identity on and outside its boundary.
  static QcMap push_point_in_disk(cplx a, cplx b, double radius = 1.0);
  // x + iy -> (a11 x + a12 y) + i (a21 x + a22 y); orientation preserving.
  static QcMap affine(double a11, double a12, double a21, double a22);
  // |psi|^{1/d} e^{i arg psi}: the shift of a branch point under z^d.
  static QcMap power_lift(const QcMap& psi, int d);
  // Applied left to right: composite({f, g})(z) = g(f(z)).
  static QcMap composite(std::vector<QcMap> maps);
  // phi o psi o phi^{-1}
  static QcMap conjugate(const QcMap& phi, const QcMap& psi);

  cplx operator()(cplx z) const;
  cplx apply_inverse(cplx w) const;
  QcMap inverse() const;

  std::string kind() const;
  std::optional<double> closed_form_K() const;
  // closed form when available; for pushes, the supremum of the pointwise
  // dilatation on a refined grid; for composites, the product bound.
  double K_estimate() const;

 private:
  explicit QcMap(std::shared_ptr<const Impl> p, bool inv = false) : impl_(std::move(p)), inverted_(inv) {}
  std::shared_ptr<const Impl> impl_;
  bool inverted_ = false;
};

// Push dilatation model: K <= kPushConstant (1 + log^2(1 / (1 - max(|a|, |b|)))).
// Calibrated on the antipodal pushes -m -> m, which maximize the hyperbolic
// distance for a given max(|a|, |b|); the worst ratio is 5.93 near m = 0.82.
// Pushes from the center stay below 1.99.
inline constexpr double kPushConstant = 6.0;

}  // namespace thk
