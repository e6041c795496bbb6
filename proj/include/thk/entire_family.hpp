#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thk/core.hpp"
#include "thk/numerics.hpp"

namespace thk {

struct Exponential {
  cplx a{1.0};
};

// a e^z + b e^{-z}
struct Cosine {
  cplx a{0.5};
  cplx b{0.5};
};

// C + integral_0^z p(w) e^{q(w)} dw
struct StructurallyFinite {
  cplx C{};
  Poly p{cplx{1.0}};
  Poly q{cplx{}, cplx{1.0}};
};

struct OrbitOverride {
  int orbit = 0;
  int index = 0;
  cplx position;
};

// The capture is carried by its effect: overridden orbit points and the
// dilatation budget K0 of a map that is the identity off the support disk.
struct CaptureData {
  double support_radius = 0.0;
  std::vector<OrbitOverride> overrides;
  double K0 = 1.0;
};

class EntireMap {
 public:
  using Family = std::variant<Exponential, Cosine, StructurallyFinite>;

  static EntireMap exponential(cplx a = 1.0);
  static EntireMap cosine(cplx a, cplx b);
  static EntireMap structurally_finite(cplx C, Poly p, Poly q);
  EntireMap with_capture(CaptureData c) const;

  const Family& family() const { return family_; }
  const std::optional<CaptureData>& capture() const { return capture_; }
  double K0() const { return capture_ ? capture_->K0 : 1.0; }
  std::string label() const;
  bool is_exponential() const { return std::holds_alternative<Exponential>(family_); }

  Scaled eval_scaled(cplx z) const;
  cplx eval(cplx z) const;
  // Structurally finite maps only: quadrature along the polyline from 0.
  Scaled eval_along(const Polyline& path) const;
  Scaled eval_quadrature(cplx z) const;
  Scaled derivative_scaled(cplx z, int k = 1) const;
  cplx derivative(cplx z, int k = 1) const;
  cplx log_eval(cplx z) const;  // some branch of log f(z)
  double log_abs(cplx z) const;
  cplx log_derivative(cplx z) const;  // f'(z)/f(z)

  std::vector<cplx> critical_points(double radius) const;
  std::vector<cplx> critical_values() const;
  std::vector<cplx> asymptotic_values() const;
  // Order of vanishing of f - f(z) at z (1 at regular points).
  int local_degree(cplx z) const;
  // Upper bound for log max_{|z|=r} |f|, given log r.
  double log_max_modulus_bound(double log_r) const;
  // Which logarithmic tract of {|f| > rho} contains z (nullopt if |f(z)| <= rho).
  std::optional<int> tract_label(cplx z, double rho) const;
  int tract_count() const;

 private:
  explicit EntireMap(Family f) : family_(std::move(f)) {}
  Family family_;
  std::optional<CaptureData> capture_;
  // structurally finite helpers
  Poly dq_;
  Poly antideriv_;  // P with P' + q'P = p when deg q = 1
  std::vector<Poly> deriv_polys_;
};

cplx eval(const EntireMap& f, cplx z);
std::vector<cplx> singular_values(const EntireMap& f);

struct GrowthExponent {
  double d = 1.5;
  double r0 = 0.0;
};
GrowthExponent growth_exponent(const EntireMap& f, double d_default = 1.5);

struct Tract {
  double radius = 0.0;
  int address = 0;
  int component = 0;
  std::vector<double> theta;  // argument of f along the boundary
  Polyline boundary;          // points with |f| = radius
  cplx base_point;            // boundary point where arg f = 2 pi address
};

Tract tract_boundary(const EntireMap& f, double rho, int address, int n_samples, int component = 0);

struct LiftOptions {
  double init_step = 1e-2;  // fraction of total path length
  double min_step = 1e-8;
  double residual_tol = 1e-9;
};

struct LiftResult {
  Polyline z;
  std::vector<std::size_t> vertex_index;  // position in z of each input vertex
};

// z(t) with f(z(t)) = path(t), z(0) = start.
LiftResult lift_path_full(const EntireMap& f, const Polyline& path, cplx start, const LiftOptions& opt = {});
Polyline lift_path(const EntireMap& f, const Polyline& path, cplx start, const LiftOptions& opt = {});
// z(t) with log f(z(t)) = zeta(t) on the branch continued from start; works
// where f itself overflows.
LiftResult lift_log_path(const EntireMap& f, const Polyline& zeta, cplx start, const LiftOptions& opt = {});

}  // namespace thk
