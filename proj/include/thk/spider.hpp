#pragma once

#include <vector>

#include "thk/core.hpp"
#include "thk/entire_family.hpp"
#include "thk/orbits.hpp"

namespace thk {

// x = e^ln. Products and powers happen on the ln scale, so bounds such as
// (K1 K0)^{nu^N} stay representable long after x itself would overflow.
class LogVal {
 public:
  LogVal() = default;
  static LogVal from_ln(double ln);
  static LogVal of(double x);  // x > 0
  static LogVal one() { return from_ln(0.0); }

  double ln() const { return ln_; }
  bool overflow() const { return overflow_; }
  double value() const { return std::exp(ln_); }

  LogVal operator*(const LogVal& o) const { return from_ln(ln_ + o.ln_); }
  LogVal pow(double p) const { return from_ln(ln_ * p); }
  bool operator<(const LogVal& o) const { return ln_ < o.ln_; }
  bool operator<=(const LogVal& o) const { return ln_ <= o.ln_; }

 private:
  double ln_ = 0.0;
  bool overflow_ = false;
};

// Universal constants of the spider estimates. Only their existence is known;
// these defaults just drive the ledger arithmetic.
struct SpiderConstants {
  double B = 8.0;
  double beta = 16.0;
  double nu = 40.0;
  double C_spider = 10.0;
  double C_reg = 1.0;  // regularity bound K <= C_reg log^{2d(m+1)} rho
};

// Upper bound (B K1 K0^2)^{beta^p} * Omega for the shift along a leg.
struct KLedger {
  LogVal base;         // B K1 K0^2
  int exponent_power = 0;
  LogVal omega_factor;  // Omega_ij(beta)
  double beta = 16.0;
  bool decomposable = true;

  LogVal bound() const;
};

// ln Omega_ij(beta) = sum_{k >= j} beta^{k-j+1} ln omega_ik, truncated at the orbit end.
double ln_omega_factor(const OrbitSpec& o, std::size_t i, std::size_t j, double beta);
// Closed-form ledger of leg (i, j) for a structure with N_i(rho) = n_inside.
KLedger closed_form_ledger(const StructureParams& p, const OrbitSpec& o, std::size_t i, std::size_t j, int n_inside,
                           const SpiderConstants& c);

// Signed crossings of the upward vertical cut above each marked point:
// +(k+1) when the path crosses the cut of point k left to right, -(k+1)
// right to left.
using Word = std::vector<int>;
Word reduce_word(const Word& w);
Word homotopy_word(const Polyline& path, const Polyline& marked);
// Word of the path continued radially out to a circle enclosing all marked
// points and the path. Legs that agree up to homotopy with endpoints sliding
// radially outside the marked set get equal words.
Word leg_word(const Polyline& path, const Polyline& marked);

// Pointwise min(|z|, rho) e^{i arg z}; the endpoint is snapped onto the circle
// when it lies within 1e-9 rho of it.
Polyline semi_project(const Polyline& path, double rho);

struct ShiftMove {
  cplx from, to;  // in the logarithmic coordinate of the tract
  cplx center;
  double radius = 0.0;
  double K = 1.0;
};

struct RegularityShift {
  Polyline path;      // from x to the circle |z| = rho
  Polyline log_path;  // the corridor in the coordinate log f
  std::vector<ShiftMove> moves;
  double K = 1.0;      // product of the move dilatations
  double bound = 0.0;  // C_reg log^{2d(m+1)} rho
  bool within_bound = true;
};

struct RegularityOptions {
  double eps = 0.5;
  double C_reg = 1.0;
  double d = 1.5;  // growth exponent of f
};

// Moves x (a boundary point of the tract of {|f| > rho} inside the disk of
// radius rho, or a point of X in that tract) to the circle |z| = rho along a
// horizontal corridor in log f coordinates, pushing it past the marked
// points of X that lie near the corridor.
RegularityShift regularity_shift(const EntireMap& f, double rho, const Polyline& X, cplx x,
                                 const RegularityOptions& opt = {});

enum class Prolongation {
  Regularity,      // last inside point: a regularity shift
  SemiProjection,  // lifted leg left the disk and was projected back to its circle
  LiftAndShift,    // lifted leg ended inside and was continued by a regularity shift
};
const char* to_string(Prolongation p);

struct Leg {
  int orbit = 0;
  int index = 0;  // j, 0-based
  cplx foot;
  Polyline path;
  Word word;  // relative to the other feet
  KLedger ledger;
  Prolongation how = Prolongation::Regularity;
  double shift_K = 1.0;  // measured dilatation of the regularity piece, 1 when absent
};

struct FatSpider {
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  Polyline removed;  // marked points outside the disk; infinity is always removed
  std::vector<Leg> legs;
  int generation = 0;
};

FatSpider standard_spider(const EntireMap& f, const StructureParams& p, const OrbitSpec& orbits,
                          const SpiderConstants& c = {});
FatSpider pull_back_spider(const FatSpider& s, const EntireMap& f, const StructureParams& p, const OrbitSpec& orbits,
                           const SpiderConstants& c = {});

// Bound (C_spider K)^{nu n} for a fat spider map on n legs.
LogVal spider_map_bound(int n_legs, const LogVal& K, const SpiderConstants& c = {});
double lift_dilatation_bound(int d, double K);

}  // namespace thk
