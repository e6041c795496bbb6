#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thk/core.hpp"

namespace thk {

// Combinatorics of the marked orbits of g(z) = e^z + kappa. Orbit 0 starts
// at the singular value kappa. A point with a successor is pulled back from
// it through log(. - kappa) + 2 pi i address; the last point of an orbit
// either maps into the orbit (loop_to) or is frozen at a pinned value.
struct PortraitOrbit {
  int length = 0;
  int loop_to = -1;            // index the last point maps to, -1 when truncated
  std::vector<int> addresses;  // one per point that has a successor
  std::optional<cplx> tail;    // pinned value of the last point of a truncated orbit
};

struct Portrait {
  std::string name;
  std::vector<PortraitOrbit> orbits;

  // kappa -> kappa + 2 pi i, which is fixed; solution kappa = log(2 pi) + i pi / 2
  static Portrait misiurewicz_2pi();
  // Singular orbit of length n whose last point is pinned at `tail`.
  static Portrait truncated(int n, cplx tail, std::vector<int> addresses);
  static Portrait by_name(const std::string& name);  // throws InvalidConfig

  void validate() const;
  int successor(int i, int j) const;  // -1 for a frozen point
  std::size_t point_count() const;
};

struct Pin {
  int orbit = 0;
  int index = 0;
  cplx value;
};

struct MarkedConfig {
  std::vector<std::vector<cplx>> positions;  // positions[i][j] of a_ij
  std::vector<std::vector<int>> addresses;
  std::vector<Pin> pins;

  cplx kappa() const { return positions.at(0).at(0); }
  bool pinned(int i, int j) const;
};

// Config with the portrait's addresses and pins and the given positions
// for every point; pinned entries are overwritten.
MarkedConfig make_config(const Portrait& p, std::vector<std::vector<cplx>> positions);
// Deterministic starting guess that keeps every pull-back away from kappa.
MarkedConfig default_init(const Portrait& p);

void repin(MarkedConfig& c);

struct StepWarning {
  int step = 0;
  int orbit = 0;
  int index = 0;
  double jump = 0.0;  // |Im| change against the previous position
};

// One pull-back. Throws SingularCollision when a successor sits at kappa.
MarkedConfig sigma_step(const MarkedConfig& c, const Portrait& p);
// Same, recording a branch jump warning for points whose imaginary part moves
// by more than pi in one step.
MarkedConfig sigma_step(const MarkedConfig& c, const Portrait& p, int step, std::vector<StepWarning>& warnings);

// sup of cyl_dist over corresponding unpinned points
double config_distance(const MarkedConfig& a, const MarkedConfig& b);

struct IterationTrace {
  std::vector<MarkedConfig> configs;
  std::vector<double> step_deltas;
  std::vector<cplx> parameter_track;
  std::vector<StepWarning> warnings;
};

struct FixedPoint {
  cplx kappa;
  MarkedConfig config;
  IterationTrace trace;
  int iterations = 0;
  double residual = 0.0;  // forward orbit of kappa against the positions
};

// Max over marked points of |g^j(kappa) - a_0j| / max(1, |a_0j|) on the
// singular orbit, and |g(a_ij) - a_i(j+1)| / max(1, |.|) elsewhere.
double forward_residual(const MarkedConfig& c, const Portrait& p);

// Iterates sigma until the step displacement drops below tol. Throws
// MaxIterExceeded, or VerificationFailed when the forward residual exceeds
// 10 tol. `trace_out`, if given, holds the trace even when it throws.
FixedPoint solve_fixed_point(const Portrait& p, const MarkedConfig& init, double tol = 1e-9, int max_iter = 200,
                             IterationTrace* trace_out = nullptr);

// Addresses read back from positions: round((a_ij - Log(a_i(j+1) - kappa)) / 2 pi i).
std::vector<std::vector<int>> recover_addresses(const MarkedConfig& c, const Portrait& p);

// Ratio of successive config distances for two paired runs. This is a proxy
// for Teichmueller distance, not the distance itself. Entries are empty
// where the previous distance is at rounding level. Stops early if either run
// fails.
std::vector<std::optional<double>> contraction_diagnostic(const Portrait& p, const MarkedConfig& a,
                                                          const MarkedConfig& b, int n_steps);

}  // namespace thk
