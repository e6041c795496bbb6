#pragma once

#include <string>
#include <vector>

#include "thk/core.hpp"
#include "thk/cyl_area.hpp"
#include "thk/entire_family.hpp"

namespace thk {

// "exp", "exp:2", "cosine", "cosine:0.5,0.5", "sf", "sf:p0,p1;q0,q1" (real
// coefficients, lowest degree first, C = 0). Throws InvalidConfig.
EntireMap parse_family(const std::string& s);

// "22026.5", "1e4" or "e10" (= exp(10)).
double parse_radius(const std::string& s);

// "e6:e12:7" or "100:1e6:5": n log-spaced radii between the ends, or a
// comma list of radii.
std::vector<double> parse_rho_grid(const std::string& s);

// "R" (centered at 0) or "x,y,R".
Disk parse_disk(const std::string& s);

// Comma list of reals.
std::vector<double> parse_reals(const std::string& s);

// Process exit code for a library error: 2 validation, 3 numerical, 4 hypothesis.
int exit_code_for(ErrorKind k);

}  // namespace thk
