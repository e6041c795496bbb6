#pragma once

namespace thk {

// log(R / r), the modulus of {r < |z| < R} without the 1/2pi factor.
double annulus_modulus(double r, double R);

// Arithmetic-geometric mean of positive reals.
double agm(double a, double b);

// Complete elliptic integral of the first kind, modulus k in [0, 1).
double ellip_k(double k);

// Modulus of the Groetzsch ring D \ [0, r]: (pi/2) K(r') / K(r).
double grotzsch_mu(double r);

}  // namespace thk
