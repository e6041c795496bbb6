#include "thk/dilatation.hpp"

#include <cmath>
#include <limits>

namespace thk {

GridSpec GridSpec::cartesian(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (!(x1 > x0) || !(y1 > y0) || nx < 1 || ny < 1) fail(ErrorKind::DomainError, "degenerate cartesian grid");
  GridSpec g;
  g.kind = Kind::Cartesian;
  g.x0 = x0;
  g.x1 = x1;
  g.y0 = y0;
  g.y1 = y1;
  g.nx = nx;
  g.ny = ny;
  return g;
}

GridSpec GridSpec::log_polar(double r0, double r1, int n_radial, int n_angular, double t0, double t1) {
  if (!(r0 > 0.0) || !(r1 > r0) || !(t1 > t0) || n_radial < 1 || n_angular < 1)
    fail(ErrorKind::DomainError, "degenerate log-polar grid");
  GridSpec g;
  g.kind = Kind::LogPolar;
  g.x0 = std::log(r0);
  g.x1 = std::log(r1);
  g.y0 = t0;
  g.y1 = t1;
  g.nx = n_radial;
  g.ny = n_angular;
  return g;
}

cplx GridSpec::center(int i, int j) const {
  double u = x0 + (x1 - x0) * (i + 0.5) / nx;
  double v = y0 + (y1 - y0) * (j + 0.5) / ny;
  return kind == Kind::Cartesian ? cplx{u, v} : std::polar(std::exp(u), v);
}

double GridSpec::min_side(int i, int j) const {
  double du = (x1 - x0) / nx, dv = (y1 - y0) / ny;
  if (kind == Kind::Cartesian) return std::min(du, dv);
  double s0 = x0 + du * i;
  double rc = std::exp(s0 + 0.5 * du);
  (void)j;
  return std::min(std::exp(s0 + du) - std::exp(s0), rc * dv);
}

double GridSpec::cyl_area(int i, int j) const {
  double du = (x1 - x0) / nx, dv = (y1 - y0) / ny;
  if (kind == Kind::LogPolar) return du * dv;
  return du * dv / std::norm(center(i, j));
}

namespace {

double fourth_order_D(const PlaneMap& f, cplx z, double h, double* mu) {
  cplx fx = (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
  cplx fy = (-f(z + kI * (2.0 * h)) + 8.0 * f(z + kI * h) - 8.0 * f(z - kI * h) + f(z - kI * (2.0 * h))) / (12.0 * h);
  cplx fz = 0.5 * (fx - kI * fy), fzb = 0.5 * (fx + kI * fy);
  double a = std::abs(fz);
  double m = a == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(fzb) / a;
  if (mu) *mu = m;
  return m < 1.0 ? (1.0 + m) / (1.0 - m) : std::numeric_limits<double>::infinity();
}

}  // namespace

PointDilatation dilatation_at(const PlaneMap& f, cplx z, double h) {
  PointDilatation p;
  p.D = fourth_order_D(f, z, h, &p.mu);
  p.D_half = fourth_order_D(f, z, 0.5 * h, nullptr);
  return p;
}

namespace {

DilatationField run(const PlaneMap& f, const GridSpec& grid, const DilatationOptions& opt) {
  const int n = grid.nx * grid.ny;
  std::vector<PointDilatation> cells(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (opt.parallel)
  for (int c = 0; c < n; ++c) {
    int i = c % grid.nx, j = c / grid.nx;
    cells[static_cast<std::size_t>(c)] = dilatation_at(f, grid.center(i, j), opt.step_fraction * grid.min_side(i, j));
  }
  DilatationField out;
  out.grid = grid;
  out.D.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
  out.mu.assign(static_cast<std::size_t>(n), 0.0);
  double integral = 0.0;
  for (int c = 0; c < n; ++c) {
    const auto& p = cells[static_cast<std::size_t>(c)];
    int i = c % grid.nx, j = c / grid.nx;
    out.mu[static_cast<std::size_t>(c)] = p.mu;
    bool finite = std::isfinite(p.D) && std::isfinite(p.D_half);
    if (finite && std::fabs(p.D - p.D_half) > opt.kink_tolerance * p.D) {
      ++out.excluded;
      continue;
    }
    if (!finite) {
      if (std::isfinite(p.D) != std::isfinite(p.D_half)) {
        ++out.excluded;
        continue;
      }
      fail(ErrorKind::NotQuasiconformalAt, "|mu| >= 1 on a grid cell", grid.center(i, j), p.mu);
    }
    out.D[static_cast<std::size_t>(c)] = p.D;
    if (p.D > out.sup_D) {
      out.sup_D = p.D;
      out.argmax = grid.center(i, j);
    }
    integral += (p.D - 1.0) * grid.cyl_area(i, j);
  }
  out.cylindrical_integral = integral / kTwoPi;
  return out;
}

}  // namespace

DilatationField measure_dilatation(const PlaneMap& f, const GridSpec& grid, const DilatationOptions& opt) {
  return run(f, grid, opt);
}

DilatationField measure_dilatation_reference(const PlaneMap& f, const GridSpec& grid) {
  DilatationOptions opt;
  opt.parallel = false;
  return run(f, grid, opt);
}

}  // namespace thk
