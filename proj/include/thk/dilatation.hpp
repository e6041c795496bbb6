#pragma once

#include <functional>
#include <vector>

#include "thk/core.hpp"

namespace thk {

struct GridSpec {
  enum class Kind { Cartesian, LogPolar } kind = Kind::Cartesian;
  // Cartesian: [x0, x1] x [y0, y1]. LogPolar: log|z| in [x0, x1], arg z in [y0, y1].
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
  int nx = 64, ny = 64;

  static GridSpec cartesian(double x0, double x1, double y0, double y1, int nx, int ny);
  static GridSpec log_polar(double r0, double r1, int n_radial, int n_angular, double t0 = 0.0, double t1 = kTwoPi);
  cplx center(int i, int j) const;
  // shortest z-plane side of cell (i, j)
  double min_side(int i, int j) const;
  // integral of 1/|z|^2 dx dy over the cell, approximated at the center
  double cyl_area(int i, int j) const;
};

struct DilatationField {
  GridSpec grid;
  std::vector<double> D;      // row-major (j * nx + i); NaN for excluded cells
  std::vector<double> mu;     // |mu| per cell
  double sup_D = 1.0;
  cplx argmax{};
  double cylindrical_integral = 0.0;  // (1/2pi) sum (D - 1) / |z|^2 dA
  int excluded = 0;                   // cells where the step-h and step-h/2 estimates disagree
};

struct DilatationOptions {
  bool parallel = true;
  double step_fraction = 1.0 / 8.0;  // h = step_fraction * shortest cell side
  double kink_tolerance = 1e-5;      // relative disagreement of D between steps h and h/2
};

using PlaneMap = std::function<cplx(cplx)>;

DilatationField measure_dilatation(const PlaneMap& f, const GridSpec& grid, const DilatationOptions& opt = {});
DilatationField measure_dilatation_reference(const PlaneMap& f, const GridSpec& grid);

// Pointwise (|mu|, D) at z from fourth order differences with step h. A cell
// whose stencil crosses a kink shows up as disagreement with step h/2.
struct PointDilatation {
  double mu = 0.0;
  double D = 1.0;
  double D_half = 1.0;
};
PointDilatation dilatation_at(const PlaneMap& f, cplx z, double h);

}  // namespace thk
