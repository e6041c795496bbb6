#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thk/core.hpp"
#include "thk/entire_family.hpp"

namespace thk {

// Point on the flat cylinder C* with metric |dz|/|z|.
struct CylPoint {
  double x = 0.0;      // log |z|
  double theta = 0.0;  // in [0, 2 pi)

  static CylPoint from(cplx z);
  cplx to_complex() const;
};

double cyl_dist(cplx z, cplx w);

struct Disk {
  cplx center;
  double radius = 0.0;
};
using Exclusion = std::vector<Disk>;

enum class TailModel { ExactSeries, StripEnvelope, FittedDecay };
const char* to_string(TailModel t);

struct AreaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double tail_bound = 0.0;
  double resolution_bound = 0.0;  // angular cells left undecided at the finest level
  long long n_samples = 0;     // radial samples
  long long evaluations = 0;   // evaluations of the indicator
  std::uint64_t seed = 0;
  double w_max = 0.0;          // last log-radius covered by strata
  bool convergence_warning = false;
  bool tail_added = false;
  TailModel tail_model = TailModel::FittedDecay;
};

struct AapOptions {
  bool parallel = true;
  double stratum_width = 0.5;
  double tail_fraction = 0.01;
  int batch = 4;
};

// Cylindrical area of {|z| >= alpha rho, |f(z)| <= rho, f(z) not in D}.
AreaEstimate aap_integral(const EntireMap& f, const Exclusion& D, double rho, double alpha,
                          std::uint64_t seed, long long budget, const AapOptions& opt = {});
// Same computation without OpenMP; bitwise identical by construction.
AreaEstimate aap_integral_reference(const EntireMap& f, const Exclusion& D, double rho, double alpha,
                                    std::uint64_t seed, long long budget);

// Angular measure of the region on the circle |z| = e^u, plus evaluations used.
struct AngularMeasure {
  double measure = 0.0;
  double undecided = 0.0;
  long long evaluations = 0;
};
AngularMeasure angular_measure(const EntireMap& f, const Exclusion& D, double rho, double u);

enum class DegenerationModel { PowerLaw, LogOverPower };
const char* to_string(DegenerationModel m);

struct DegenerationFit {
  DegenerationModel model = DegenerationModel::PowerLaw;
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> samples;  // (rho, I) actually used
};

// Weighted least squares on (log rho, log I). PowerLaw: I ~ rho^k.
// LogOverPower: I ~ log(rho) rho^k.
DegenerationFit fit_degeneration(const std::vector<std::pair<double, AreaEstimate>>& samples);

struct SparseVerdict {
  bool sparse = true;
  std::size_t i = 0, j = 0;
  double distance = 0.0;  // +inf with fewer than two points
};
SparseVerdict log_sparse_check(const std::vector<cplx>& points, double delta);

struct ScalingRow {
  double rho = 0.0;
  AreaEstimate lhs, first, second;  // I_alpha(rho), I_1(alpha rho), I_1(alpha^2 rho)
  double margin = 0.0;              // first + 2 second - lhs
  double sigma = 0.0;
  bool holds = false;               // margin > -3 sigma
};
struct ScalingReport {
  std::vector<ScalingRow> rows;
  double threshold = 0.0;  // smallest grid rho from which the inequality holds onward; 0 if never
};
ScalingReport scaling_lemma_check(const EntireMap& f, const Exclusion& D, const std::vector<double>& rhos,
                                  double alpha, std::uint64_t seed, long long budget);

}  // namespace thk
