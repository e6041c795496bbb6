#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "thk/core.hpp"

namespace thk {

// Polynomials are coefficient vectors, lowest degree first.
using Poly = std::vector<cplx>;

cplx poly_eval(const Poly& p, cplx z);
Poly poly_deriv(const Poly& p);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_trim(Poly p);
int poly_degree(const Poly& p);  // -1 for the zero polynomial
std::vector<cplx> poly_roots(const Poly& p);
// Sum of |coefficient| * r^k, an upper bound for |p| on the circle |z| = r.
double poly_abs_bound(const Poly& p, double r);

struct QuadResult {
  cplx value;
  double error = 0.0;
  int evals = 0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b] with bisection up to max_depth levels.
QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                        double rel_tol = 1e-12, int max_depth = 20);

// Counter-based seeding so that stream k of a run never depends on how other
// streams were consumed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace thk
