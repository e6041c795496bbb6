#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "thk/core.hpp"
#include "thk/cyl_area.hpp"
#include "thk/entire_family.hpp"
#include "thk/orbits.hpp"

namespace thk {

struct EscapeReport {
  double k = 1.0;
  bool exp_fast = false;  // log|a_{n+1}| >= k |a_n| for every n >= n0
  int n0 = -1;
  // log log|a_{j+1}| / log log|a_j|; NaN where either point has |a| <= e
  std::vector<double> loglog_ratio;
  double loglog_inf_tail = std::numeric_limits<double>::quiet_NaN();  // over the second half of the defined ratios
  bool eventually_monotone = false;
  int monotone_from = -1;  // |a_j| strictly increasing from here on
  std::vector<int> log_excluded;     // points at 0
  std::vector<int> loglog_excluded;  // points with |a| <= e
};

EscapeReport classify_escape(const Polyline& orbit, double k = 1.0);

// Singular values of the captured map: those of f0 outside the capture disk,
// plus the positions the capture assigns to first orbit points.
std::vector<cplx> captured_singular_values(const EntireMap& f);

struct ClauseVerdict {
  std::string clause;  // "1", "2a" .. "2e", "3", "4"
  bool holds = true;
  std::string witness;
};

enum class K1Source { Constructive, Bound };
const char* to_string(K1Source s);

struct SeparatingStructureReport {
  StructureParams params;  // K0 from the capture, K1 as measured
  std::vector<ClauseVerdict> verdicts;
  int N_rho = 0;
  K1Source k1_source = K1Source::Constructive;
  double K1_bound = 0.0;  // C_reg log^{2d(m+1)} rho
  int regularity_shifts = 0;
  double ln_max_omega_product = 0.0;  // ln max_i prod_j omega_ij over the computed orbit
  bool omega_truncation_exact = true;

  bool holds() const;
  const ClauseVerdict& clause(const std::string& name) const;
};

struct StructureOptions {
  double C_reg = 1.0;
  int boundary_samples = 33;  // boundary points per tract, spread over two periods of arg f
};

// U is the bounded domain around the singular values, given after the capture.
SeparatingStructureReport check_separating_structure(const EntireMap& f, const OrbitSpec& orbits,
                                                     const StructureParams& p, const Exclusion& U,
                                                     const StructureOptions& opt = {});

struct InvariantMargin {
  double margin = 0.0;  // ln Delta - ln LHS; +inf for zero area, -inf when unverifiable
  bool overflow = false;
  bool exact_zero_area = false;
  double ln_area = 0.0;
  double ln_dilatation_term = 0.0;  // nu^N ln(K1 K0 max prod omega)
};

InvariantMargin invariant_inequality(int N, double K0, double K1, double ln_max_omega_product, double I_q,
                                     double delta = 1e-3, double nu = 40.0);
InvariantMargin invariant_inequality(const SeparatingStructureReport& r, const AreaEstimate& I_q, double delta = 1e-3,
                                     double nu = 40.0);

struct FixedPointVerdict {
  bool separated = true;  // pairwise cyl distance > eps outside the disk
  std::string witness;
  // (r, min pairwise cyl distance among marked points with |z| > r); a trend, not a limit
  std::vector<std::pair<double, double>> min_dist_by_r;
  bool distances_increasing = true;
};

FixedPointVerdict fixed_point_conditions(const OrbitSpec& orbits, double rho, double eps);

struct RhoSweepRow {
  double rho = 0.0;
  int N = 0;
  bool structure_holds = false;
  std::string failed_clauses;
  double K1 = 1.0;
  double I_q = 0.0;
  double I_q_error = 0.0;
  InvariantMargin margin;
  double envelope = 0.0;  // A log log log rho with the fitted A
};

struct SweepOptions {
  double q = 0.1;
  double eps = 0.5;
  double delta = 1e-3;
  double nu = 40.0;
  Exclusion D{{cplx(0.0), 0.5}};
  Exclusion U{{cplx(0.0), 0.75}};
  std::uint64_t seed = 1;
  long long budget = 200000;
  StructureOptions structure;
};

struct AdmissibleRho {
  double rho = 0.0;
  SeparatingStructureReport report;
  InvariantMargin margin;
  std::vector<RhoSweepRow> sweep;
  double A_fit = 0.0;  // smallest A with N(rho) <= A log log log rho on the grid
};

// First grid rho where the structure holds with positive margin. Throws
// NotFound with the best margin seen when there is none.
AdmissibleRho find_admissible_rho(const EntireMap& f, const OrbitSpec& orbits, const std::vector<double>& grid,
                                  const SweepOptions& opt = {});
// The sweep alone, without selecting a radius.
std::vector<RhoSweepRow> rho_sweep(const EntireMap& f, const OrbitSpec& orbits, const std::vector<double>& grid,
                                   const SweepOptions& opt = {});

}  // namespace thk
