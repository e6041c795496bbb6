#pragma once

#include <vector>

#include "thk/core.hpp"
#include "thk/entire_family.hpp"

namespace thk {

// Marked orbits a_{ij}; orbits[i][j] holds a_{i(j+1)}.
struct OrbitSpec {
  enum class Source { Forward, Explicit } source = Source::Explicit;
  std::vector<Polyline> orbits;
  std::vector<std::vector<int>> omegas;  // local degrees; missing entries mean 1
  std::vector<int> truncated_at;         // index of the first iterate that overflowed, or -1

  static OrbitSpec explicit_orbits(std::vector<Polyline> orbits, std::vector<std::vector<int>> omegas = {});
  // Seed plus n iterates of f per orbit, recording local degrees and overflow
  // truncation. Capture overrides replace the iterate at their position.
  static OrbitSpec forward(const EntireMap& f, const std::vector<cplx>& seeds, int n);

  int omega(std::size_t i, std::size_t j) const;
  std::size_t size() const { return orbits.size(); }
};

// The seed followed by n iterates. Stops before the first iterate that
// overflows and reports its index through `truncated_at`.
std::vector<cplx> forward_orbit(const EntireMap& f, cplx seed, int n, int* truncated_at = nullptr);

// N_i(rho): number of points of orbit i inside the open disk of radius rho.
int count_inside(const OrbitSpec& o, std::size_t i, double rho);
// N(rho) = sum of N_i(rho).
int count_inside(const OrbitSpec& o, double rho);

struct StructureParams {
  double rho = 0.0;
  double q = 0.25;
  double K0 = 1.0;
  double K1 = 1.0;
  double eps = 0.5;
};

}  // namespace thk
