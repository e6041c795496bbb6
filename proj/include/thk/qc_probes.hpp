#pragma once

#include <vector>

#include "thk/core.hpp"
#include "thk/dilatation.hpp"
#include "thk/qc_maps.hpp"

namespace thk {

enum class BoundConvention {
  Floor,   // n <= bound
  Strict,  // n < bound, so an integer bound b gives b - 1
};

// Largest n with n <= (or <) log|p| / (2 pi) * K^{1/C}. Bounds within 1e-12
// relative of an integer are treated as that integer.
long long twist_bound(cplx p, double K, double C = 1.0, BoundConvention conv = BoundConvention::Floor);

struct Quadrilateral {
  Polyline boundary;     // simple closed polygon, positively oriented, last vertex not repeated
  int vertex[4] = {0, 1, 2, 3};  // marked corners; a-sides are v0->v1 and v2->v3
};

struct RengelBounds {
  double lower = 0.0;  // s_b^2 / area
  double upper = 0.0;  // area / s_a^2
  double s_a = 0.0, s_b = 0.0, area = 0.0;
};
RengelBounds rengel_bounds(const Quadrilateral& q);
// Shortest path inside the polygon between the two boundary chains.
double inner_distance(const Polyline& polygon, const Polyline& chain_a, const Polyline& chain_b);

struct ProbeRow {
  double kappa = 0.0;
  double displacement = 0.0;         // measured sup of cyl_dist(phi(z), z) on |z| < r0/4
  double closed_form = 0.0;          // |log of the inner stretch factor|
  double measured_integral = 0.0;    // grid value of the cylindrical integral of D - 1
};
// Radial maps identity outside 2 r0, with cylindrical integral kappa supported
// on r0 < |z| < 2 r0.
std::vector<ProbeRow> distortion_probe(const std::vector<double>& kappas, double r0 = 0.1);
QcMap probe_map(double kappa, double r0);

struct ModulusCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  int excluded = 0;  // grid cells dropped at interface circles; rhs undercounts when nonzero
};
// |mod phi(A) - mod A| against the cylindrical integral of D - 1 over A.
ModulusCheck modulus_difference_check(const QcMap& map, double r, double R);

// max |phi| / min |phi| over the image of the circle |z| = radius.
double max_over_min_ratio(const QcMap& map, double radius, int samples = 2048);

}  // namespace thk
