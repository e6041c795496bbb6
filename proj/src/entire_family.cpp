#include "thk/entire_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double logsumexp_abs(const Poly& p, double log_r) {
  double mx = -INFINITY;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] != cplx{}) mx = std::max(mx, std::log(std::abs(p[k])) + k * log_r);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] != cplx{}) s += std::exp(std::log(std::abs(p[k])) + k * log_r - mx);
  return mx + std::log(s);
}

void push_unique(std::vector<cplx>& v, cplx z) {
  for (const auto& w : v)
    if (std::abs(w - z) <= 1e-10 * std::max(1.0, std::abs(z))) return;
  v.push_back(z);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

EntireMap EntireMap::exponential(cplx a) {
  if (a == cplx{}) fail(ErrorKind::DomainError, "exponential scale must be nonzero");
  return EntireMap(Exponential{a});
}

EntireMap EntireMap::cosine(cplx a, cplx b) {
  if (a == cplx{} || b == cplx{}) fail(ErrorKind::DomainError, "cosine family needs a != 0 and b != 0");
  return EntireMap(Cosine{a, b});
}

EntireMap EntireMap::structurally_finite(cplx C, Poly p, Poly q) {
  p = poly_trim(std::move(p));
  q = poly_trim(std::move(q));
  if (poly_degree(q) < 1) fail(ErrorKind::DomainError, "structurally finite family needs deg q >= 1");
  if (poly_degree(p) < 0) fail(ErrorKind::DomainError, "structurally finite family needs p != 0");
  EntireMap m(StructurallyFinite{C, p, q});
  m.dq_ = poly_deriv(q);
  if (poly_degree(q) == 1) {
    cplx q1 = q[1];
    Poly acc{cplx{}};
    Poly dk = p;
    cplx denom = q1;
    double sign = 1.0;
    for (int k = 0; k <= poly_degree(p); ++k) {
      Poly term = dk;
      for (auto& c : term) c *= sign / denom;
      acc = poly_add(acc, term);
      dk = poly_deriv(dk);
      denom *= q1;
      sign = -sign;
    }
    m.antideriv_ = poly_trim(acc);
  }
  m.deriv_polys_.push_back(p);
  for (int k = 1; k < 16; ++k) {
    const Poly& prev = m.deriv_polys_.back();
    m.deriv_polys_.push_back(poly_trim(poly_add(poly_deriv(prev), poly_mul(prev, m.dq_))));
  }
  return m;
}

EntireMap EntireMap::with_capture(CaptureData c) const {
  if (c.K0 < 1.0) fail(ErrorKind::DomainError, "capture dilatation K0 must be >= 1");
  for (const auto& o : c.overrides)
    if (std::abs(o.position) >= c.support_radius)
      fail(ErrorKind::DomainError, "capture override outside the support disk", o.position);
  EntireMap m = *this;
  m.capture_ = std::move(c);
  return m;
}

std::string EntireMap::label() const {
  return std::visit(overloaded{[](const Exponential&) { return std::string("exp"); },
                               [](const Cosine&) { return std::string("cosine"); },
                               [](const StructurallyFinite&) { return std::string("sf"); }},
                    family_);
}

Scaled EntireMap::eval_scaled(cplx z) const {
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return Scaled{e.a * std::polar(1.0, z.imag()), z.real()}; },
          [&](const Cosine& c) {
            if (z.real() >= 0.0)
              return Scaled{(c.a + c.b * std::exp(-2.0 * z)) * std::polar(1.0, z.imag()), z.real()};
            return Scaled{(c.a * std::exp(2.0 * z) + c.b) * std::polar(1.0, -z.imag()), -z.real()};
          },
          [&](const StructurallyFinite& s) {
            if (antideriv_.empty()) return eval_quadrature(z);
            cplx qz = poly_eval(s.q, z);
            cplx P0e = poly_eval(antideriv_, cplx{}) * std::exp(s.q[0]);
            cplx Pz = poly_eval(antideriv_, z);
            if (qz.real() > 0.0)
              return Scaled{Pz * std::polar(1.0, qz.imag()) + (s.C - P0e) * std::exp(-qz.real()), qz.real()};
            return Scaled{s.C + Pz * std::exp(qz) - P0e, 0.0};
          }},
      family_);
}

cplx EntireMap::eval(cplx z) const { return eval_scaled(z).value(); }

Scaled EntireMap::eval_quadrature(cplx z) const { return eval_along({cplx{}, z}); }

Scaled EntireMap::eval_along(const Polyline& path) const {
  const auto* s = std::get_if<StructurallyFinite>(&family_);
  if (!s) fail(ErrorKind::Unsupported, "path quadrature applies to structurally finite maps only");
  if (path.empty() || std::abs(path.front()) > 0.0) fail(ErrorKind::DomainError, "quadrature path must start at 0");
  double S = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    for (int k = 0; k <= 64; ++k) {
      cplx w = path[i] + (path[i + 1] - path[i]) * (k / 64.0);
      S = std::max(S, poly_eval(s->q, w).real());
    }
  cplx acc{};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    cplx w0 = path[i], dw = path[i + 1] - path[i];
    if (dw == cplx{}) continue;
    auto g = [&](double t) {
      cplx w = w0 + dw * t;
      return dw * poly_eval(s->p, w) * std::exp(poly_eval(s->q, w) - S);
    };
    QuadResult r = integrate_gk(g, 0.0, 1.0, 1e-12, 20);
    if (!r.converged) fail(ErrorKind::NumericalFailure, "quadrature did not converge on segment", path[i + 1]);
    acc += r.value;
  }
  return Scaled{acc + s->C * std::exp(-S), S};
}

Scaled EntireMap::derivative_scaled(cplx z, int k) const {
  if (k <= 0) return eval_scaled(z);
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return Scaled{e.a * std::polar(1.0, z.imag()), z.real()}; },
          [&](const Cosine& c) {
            double sg = (k % 2 == 0) ? 1.0 : -1.0;
            if (z.real() >= 0.0)
              return Scaled{(c.a + sg * c.b * std::exp(-2.0 * z)) * std::polar(1.0, z.imag()), z.real()};
            return Scaled{(c.a * std::exp(2.0 * z) + sg * c.b) * std::polar(1.0, -z.imag()), -z.real()};
          },
          [&](const StructurallyFinite& s) {
            if (k - 1 >= static_cast<int>(deriv_polys_.size()))
              fail(ErrorKind::Unsupported, "derivative order too high");
            cplx qz = poly_eval(s.q, z);
            return Scaled{poly_eval(deriv_polys_[k - 1], z) * std::polar(1.0, qz.imag()), qz.real()};
          }},
      family_);
}

cplx EntireMap::derivative(cplx z, int k) const { return derivative_scaled(z, k).value(); }

cplx EntireMap::log_eval(cplx z) const { return eval_scaled(z).log(); }

double EntireMap::log_abs(cplx z) const { return eval_scaled(z).log_abs(); }

cplx EntireMap::log_derivative(cplx z) const {
  return std::visit(overloaded{[&](const Exponential&) { return cplx{1.0}; },
                               [&](const Cosine& c) {
                                 if (z.real() >= 0.0) {
                                   cplx t = c.b * std::exp(-2.0 * z);
                                   return (c.a - t) / (c.a + t);
                                 }
                                 cplx t = c.a * std::exp(2.0 * z);
                                 return (t - c.b) / (t + c.b);
                               },
                               [&](const StructurallyFinite&) {
                                 Scaled num = derivative_scaled(z, 1);
                                 Scaled den = eval_scaled(z);
                                 if (den.m == cplx{}) fail(ErrorKind::DomainError, "log derivative at a zero", z);
                                 return num.m / den.m * std::exp(num.e - den.e);
                               }},
                    family_);
}

std::vector<cplx> EntireMap::critical_points(double radius) const {
  std::vector<cplx> out;
  std::visit(overloaded{[&](const Exponential&) {},
                        [&](const Cosine& c) {
                          cplx c0 = 0.5 * std::log(c.b / c.a);
                          int K = static_cast<int>(std::ceil((radius + std::abs(c0)) / kPi)) + 1;
                          for (int k = -K; k <= K; ++k) {
                            cplx z = c0 + kI * (kPi * k);
                            if (std::abs(z) <= radius) out.push_back(z);
                          }
                        },
                        [&](const StructurallyFinite& s) {
                          for (cplx r : poly_roots(s.p))
                            if (std::abs(r) <= radius) out.push_back(r);
                        }},
             family_);
  return out;
}

std::vector<cplx> EntireMap::critical_values() const {
  std::vector<cplx> out;
  std::visit(overloaded{[&](const Exponential&) {},
                        [&](const Cosine& c) {
                          cplx c0 = 0.5 * std::log(c.b / c.a);
                          cplx v = eval(c0);
                          push_unique(out, v);
                          push_unique(out, -v);
                        },
                        [&](const StructurallyFinite& s) {
                          for (cplx r : poly_roots(s.p)) push_unique(out, eval(r));
                        }},
             family_);
  return out;
}

std::vector<cplx> EntireMap::asymptotic_values() const {
  std::vector<cplx> out;
  std::visit(
      overloaded{[&](const Exponential&) { out.push_back(cplx{}); }, [&](const Cosine&) {},
                 [&](const StructurallyFinite& s) {
                   int d = poly_degree(s.q);
                   double arg_alpha = std::arg(s.q[d]);
                   for (int k = 1; k <= d; ++k) {
                     double th = ((2 * k + 1) * kPi - arg_alpha) / d;
                     cplx dir = std::polar(1.0, th);
                     // piece boundaries 0, 1, 2, 4, ... until the integrand is negligible
                     std::vector<double> edges{0.0, 1.0};
                     while (true) {
                       double t = edges.back();
                       cplx w = t * dir;
                       double lg = poly_eval(s.q, w).real() + std::log(std::max(1.0, std::abs(poly_eval(s.p, w)) * t));
                       cplx w2 = 2.0 * t * dir;
                       double lg2 = poly_eval(s.q, w2).real() +
                                    std::log(std::max(1.0, std::abs(poly_eval(s.p, w2)) * 2.0 * t));
                       if (lg < std::log(1e-16) && lg2 < lg) break;
                       if (edges.size() > 60) fail(ErrorKind::NumericalFailure, "asymptotic value tail did not decay");
                       edges.push_back(2.0 * t);
                     }
                     std::vector<cplx> parts;
                     std::vector<double> scales;
                     double S = -INFINITY;
                     for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
                       double a = edges[i], b = edges[i + 1];
                       double Si = -INFINITY;
                       for (int j = 0; j <= 32; ++j) Si = std::max(Si, poly_eval(s.q, (a + (b - a) * j / 32.0) * dir).real());
                       auto g = [&](double t) {
                         cplx w = t * dir;
                         return dir * poly_eval(s.p, w) * std::exp(poly_eval(s.q, w) - Si);
                       };
                       QuadResult r = integrate_gk(g, a, b, 1e-12, 20);
                       if (!r.converged) fail(ErrorKind::NumericalFailure, "asymptotic value quadrature did not converge");
                       parts.push_back(r.value);
                       scales.push_back(Si);
                       S = std::max(S, Si);
                     }
                     if (S > 700.0) fail(ErrorKind::NumericalFailure, "asymptotic value not representable");
                     cplx acc{};
                     for (std::size_t i = 0; i < parts.size(); ++i) acc += parts[i] * std::exp(scales[i]);
                     push_unique(out, s.C + acc);
                   }
                 }},
      family_);
  return out;
}

int EntireMap::local_degree(cplx z) const {
  int k = 1;
  while (k < 12) {
    double dk = std::abs(derivative(z, k));
    double dn = std::abs(derivative(z, k + 1));
    if (dk > 1e-10 * std::max(1.0, dn)) break;
    ++k;
  }
  return k;
}

double EntireMap::log_max_modulus_bound(double log_r) const {
  // returns log log of an upper bound B(r) >= max_{|z|=r}|f(z)|
  auto loglog_exp_bound = [&](double log_c) {
    // B = c e^r
    if (log_r > 700.0) return log_r + std::log1p(log_c * std::exp(-log_r));
    double lb = std::exp(log_r) + log_c;
    return lb > 0.0 ? std::log(lb) : -INFINITY;
  };
  return std::visit(
      overloaded{[&](const Exponential& e) { return loglog_exp_bound(std::log(std::abs(e.a))); },
                 [&](const Cosine& c) { return loglog_exp_bound(std::log(std::abs(c.a) + std::abs(c.b))); },
                 [&](const StructurallyFinite& s) {
                   double LQ = logsumexp_abs(s.q, log_r);
                   double LP = logsumexp_abs(s.p, log_r);
                   if (LQ > 700.0) return LQ + std::log1p((log_r + LP) * std::exp(-LQ));
                   double lb = std::exp(LQ) + log_r + LP;
                   if (s.C != cplx{}) {
                     double lc = std::log(std::abs(s.C));
                     double mx = std::max(lb, lc);
                     lb = mx + std::log(std::exp(lb - mx) + std::exp(lc - mx));
                   }
                   return lb > 0.0 ? std::log(lb) : -INFINITY;
                 }},
      family_);
}

int EntireMap::tract_count() const {
  return std::visit(overloaded{[](const Exponential&) { return 1; }, [](const Cosine&) { return 2; },
                               [](const StructurallyFinite& s) { return poly_degree(s.q); }},
                    family_);
}

std::optional<int> EntireMap::tract_label(cplx z, double rho) const {
  if (log_abs(z) <= std::log(rho)) return std::nullopt;
  return std::visit(overloaded{[](const Exponential&) { return 0; },
                               [&](const Cosine&) { return z.real() >= 0.0 ? 0 : 1; },
                               [&](const StructurallyFinite& s) {
                                 int d = poly_degree(s.q);
                                 double a = std::arg(s.q[d]);
                                 int best = 0;
                                 double gap = INFINITY;
                                 for (int j = 0; j < d; ++j) {
                                   double g = angle_gap(std::arg(z), (2 * kPi * j - a) / d);
                                   if (g < gap) gap = g, best = j;
                                 }
                                 return best;
                               }},
                    family_);
}

cplx eval(const EntireMap& f, cplx z) { return f.eval(z); }

std::vector<cplx> singular_values(const EntireMap& f) {
  std::vector<cplx> out = f.critical_values();
  for (cplx v : f.asymptotic_values()) push_unique(out, v);
  return out;
}

GrowthExponent growth_exponent(const EntireMap& f, double d_default) {
  const int kRun = 100;
  const int kMax = 4000;
  int run = 0;
  for (int k = 0; k < kMax; ++k) {
    double log_r = 1.0 + k * std::log(2.0);
    bool ok = f.log_max_modulus_bound(log_r) < std::pow(log_r, d_default);
    run = ok ? run + 1 : 0;
    if (run == kRun) {
      int k0 = k - kRun + 1;
      return {d_default, std::exp(1.0 + k0 * std::log(2.0))};
    }
  }
  return {d_default, INFINITY};
}

// ---------------------------------------------------------------------------
// continuation

namespace {

struct Target {
  const EntireMap& f;
  bool log_mode;

  cplx value(cplx z) const { return log_mode ? f.log_eval(z) : f.eval(z); }
  cplx deriv(cplx z) const { return log_mode ? f.log_derivative(z) : f.derivative(z); }
  cplx residual(cplx z, cplx w) const {
    if (!log_mode) return f.eval(z) - w;
    cplx r = f.log_eval(z) - w;
    return r - kI * (kTwoPi * std::round(r.imag() / kTwoPi));
  }
  double scale(cplx w) const { return log_mode ? 1.0 : std::max(1.0, std::abs(w)); }
};

bool newton(const Target& T, cplx& z, cplx w, double tol, int max_iter = 20) {
  for (int it = 0; it < max_iter; ++it) {
    cplx r = T.residual(z, w);
    if (!std::isfinite(std::abs(r))) return false;
    if (std::abs(r) <= tol) return true;
    cplx d = T.deriv(z);
    if (d == cplx{} || !std::isfinite(std::abs(d))) return false;
    z -= r / d;
  }
  return std::abs(T.residual(z, w)) <= tol;
}

void check_collisions(const EntireMap& f, const Polyline& path, bool log_mode, double total_len) {
  std::vector<cplx> sv = singular_values(f);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    cplx a = path[i], b = path[i + 1];
    // in log coordinates v is met where the path crosses log v + 2 pi i k; 0 is never met
    std::vector<cplx> targets;
    if (log_mode) {
      for (cplx v : sv) {
        if (v == cplx(0.0)) continue;
        cplx lv = std::log(v);
        double lo = std::min(a.imag(), b.imag()) - 1.0, hi = std::max(a.imag(), b.imag()) + 1.0;
        for (double k = std::ceil((lo - lv.imag()) / kTwoPi); lv.imag() + kTwoPi * k <= hi; k += 1.0)
          targets.push_back(lv + cplx(0.0, kTwoPi * k));
      }
    } else {
      targets = sv;
    }
    for (cplx v : targets) {
      cplx ab = b - a;
      double L2 = std::norm(ab);
      double s = L2 > 0.0 ? std::clamp(((v - a) * std::conj(ab)).real() / L2, 0.0, 1.0) : 0.0;
      double dist = std::abs(a + s * ab - v);
      if (i == 0 && s < 1e-9) continue;  // start may sit on a critical value
      if (dist < 1e-12 * std::max(1.0, std::abs(v))) {
        double t = total_len > 0.0 ? (acc + s * std::abs(path[i + 1] - path[i])) / total_len : 0.0;
        fail(ErrorKind::CriticalCollision, "path meets singular value " + fmt_cplx(v), v, t);
      }
    }
    acc += std::abs(path[i + 1] - path[i]);
  }
}

LiftResult run_lift(const EntireMap& f, bool log_mode, const Polyline& path, cplx start, const LiftOptions& opt) {
  if (path.empty()) fail(ErrorKind::DomainError, "empty path");
  Target T{f, log_mode};
  {
    cplx r = T.residual(start, path.front());
    if (!(std::abs(r) <= 1e-9 * T.scale(path.front())))
      fail(ErrorKind::DomainError, "start does not lie over the path origin", start);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) total += std::abs(path[i + 1] - path[i]);
  check_collisions(f, path, log_mode, total);

  LiftResult out;
  out.z.push_back(start);
  out.vertex_index.push_back(0);
  cplx z = start;
  int omega = 1;
  if (std::abs(T.deriv(start)) < 1e-8) omega = f.local_degree(start);
  bool at_critical = omega > 1;
  double done = 0.0;

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    cplx w0 = path[i], dw = path[i + 1] - path[i];
    double L = std::abs(dw);
    if (L == 0.0) {
      out.vertex_index.push_back(out.z.size() - 1);
      continue;
    }
    double h0 = std::min(1.0, opt.init_step * total / L);
    double hmin = opt.min_step * total / L;
    double h = h0, s = 0.0;
    while (s < 1.0) {
      double ht = std::min(h, 1.0 - s);
      cplx wt = w0 + dw * (s + ht);
      cplx zp;
      if (at_critical) {
        // local model f(z) ~ f(c) + f^(w)(c)/w! (z - c)^w
        cplx coeff = f.derivative(start, omega) / factorial(omega);
        if (log_mode) coeff /= f.eval(start);
        cplx dv = log_mode ? T.residual(start, wt) * -1.0 : wt - f.eval(start);
        zp = start + std::pow(dv / coeff, 1.0 / omega);
      } else {
        auto rhs = [&](cplx zz) { return dw / T.deriv(zz); };
        cplx k1 = rhs(z);
        cplx k2 = rhs(z + 0.5 * ht * k1);
        cplx k3 = rhs(z + 0.5 * ht * k2);
        cplx k4 = rhs(z + ht * k3);
        zp = z + ht / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      cplx zc = zp;
      bool ok = std::isfinite(std::abs(zp)) && newton(T, zc, wt, 1e-13 * T.scale(wt));
      if (ok && !at_critical) ok = std::abs(zc - zp) <= 0.3 * std::abs(zp - z) + 1e-12 * (1.0 + std::abs(z));
      if (!ok) {
        h = 0.5 * ht;
        if (h < hmin) {
          double t = total > 0.0 ? (done + s * L) / total : 0.0;
          fail(ErrorKind::LiftDiverged, "corrector failed at t = " + std::to_string(t), z, t);
        }
        continue;
      }
      z = zc;
      s += ht;
      out.z.push_back(z);
      at_critical = false;
      h = std::min(h0, 1.5 * ht);
    }
    done += L;
    out.vertex_index.push_back(out.z.size() - 1);
  }
  cplx r = T.residual(z, path.back());
  if (!(std::abs(r) < opt.residual_tol * T.scale(path.back())))
    fail(ErrorKind::LiftDiverged, "endpoint residual too large", z, 1.0);
  return out;
}

}  // namespace

LiftResult lift_path_full(const EntireMap& f, const Polyline& path, cplx start, const LiftOptions& opt) {
  return run_lift(f, false, path, start, opt);
}

Polyline lift_path(const EntireMap& f, const Polyline& path, cplx start, const LiftOptions& opt) {
  return run_lift(f, false, path, start, opt).z;
}

LiftResult lift_log_path(const EntireMap& f, const Polyline& zeta, cplx start, const LiftOptions& opt) {
  return run_lift(f, true, zeta, start, opt);
}

Tract tract_boundary(const EntireMap& f, double rho, int address, int n_samples, int component) {
  if (n_samples < 3) fail(ErrorKind::DomainError, "tract boundary needs at least 3 samples");
  if (component < 0 || component >= f.tract_count()) fail(ErrorKind::DomainError, "no such tract component");
  double max_sv = 0.0;
  for (cplx v : singular_values(f)) max_sv = std::max(max_sv, std::abs(v));
  if (!(rho > max_sv) || !(std::log(rho) > f.log_abs(cplx{})))
    fail(ErrorKind::DomainError, "rho must exceed the singular values and |f(0)|");

  double lr = std::log(rho);
  double th0 = kTwoPi * address;
  cplx target{lr, th0};
  cplx z = std::visit(overloaded{[&](const Exponential& e) { return target - std::log(e.a); },
                                 [&](const Cosine& c) {
                                   return component == 0 ? target - std::log(c.a) : std::log(c.b) - target;
                                 },
                                 [&](const StructurallyFinite& s) {
                                   int d = poly_degree(s.q);
                                   cplx w = (target - s.q[0]) / s.q[d];
                                   return std::pow(w, 1.0 / d) * std::polar(1.0, kTwoPi * component / d);
                                 }},
                      f.family());
  Target T{f, true};
  bool ok = false;
  for (int it = 0; it < 200 && !ok; ++it) {
    cplx r = T.residual(z, target);
    if (std::abs(r) < 1e-13) {
      ok = true;
      break;
    }
    cplx step = r / T.deriv(z);
    double cap = 0.5 + 0.25 * std::abs(z);
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    z -= step;
  }
  if (!ok) fail(ErrorKind::NumericalFailure, "could not locate tract base point");

  Tract tr;
  tr.radius = rho;
  tr.address = address;
  tr.component = component;
  tr.base_point = z;
  std::vector<double> th(n_samples);
  for (int j = 0; j < n_samples; ++j) th[j] = th0 - kPi + kTwoPi * j / (n_samples - 1);
  // lift from the base point downward and upward in theta
  Polyline down{target}, up{target};
  for (int j = n_samples - 1; j >= 0; --j)
    if (th[j] < th0) down.push_back({lr, th[j]});
  for (int j = 0; j < n_samples; ++j)
    if (th[j] > th0) up.push_back({lr, th[j]});
  LiftResult ld, lu;
  try {
    ld = lift_log_path(f, down, z);
    lu = lift_log_path(f, up, z);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LiftDiverged)
      fail(ErrorKind::BoundaryBranchPoint, "continuation failed near a critical point on the level curve", e.where());
    throw;
  }
  for (std::size_t k = down.size() - 1; k >= 1; --k) {
    tr.boundary.push_back(ld.z[ld.vertex_index[k]]);
    tr.theta.push_back(down[k].imag());
  }
  bool base_is_sample = false;
  for (double t : th)
    if (t == th0) base_is_sample = true;
  if (base_is_sample) {
    tr.boundary.push_back(z);
    tr.theta.push_back(th0);
  }
  for (std::size_t k = 1; k < up.size(); ++k) {
    tr.boundary.push_back(lu.z[lu.vertex_index[k]]);
    tr.theta.push_back(up[k].imag());
  }
  return tr;
}

}  // namespace thk
