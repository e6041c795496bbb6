#include "thk/qc_maps.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

namespace thk {

namespace {

struct Identity {};

struct RadialPower {
  double r_in, R, a;
};

struct Twist {
  double theta, r, R;
};

// Conformal model: disk -> (a at 0, b at r2 > 0) -> upper half plane -> strip
// 0 < Im s < pi, where the push is the shear x -> x + l g(x) sin y.
struct Push {
  cplx a, b;
  double radius;
  cplx rot;      // e^{i phi}
  double ell;    // hyperbolic distance log((1+r2)/(1-r2))
  double width;  // support half-width of the bump g
  double K;
};

struct Affine {
  double m[4];
  double inv[4];
  double K;
};

struct PowerLift {
  std::vector<QcMap> inner;  // exactly one
  int d;
};

struct Composite {
  std::vector<QcMap> maps;
};

double smootherstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smootherstep_d(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

double bump(const Push& p, double x) {
  double t = std::fabs(x) / p.width;
  return t >= 1.0 ? 0.0 : 1.0 - smootherstep(t);
}

double bump_d(const Push& p, double x) {
  double t = std::fabs(x) / p.width;
  if (t >= 1.0) return 0.0;
  return -(x < 0.0 ? -1.0 : 1.0) * smootherstep_d(t) / p.width;
}

double push_mu(const Push& p, double x, double y) {
  double P = p.ell * bump_d(p, x) * std::sin(y);
  double Q = p.ell * bump(p, x) * std::cos(y);
  return std::abs(cplx{P, Q}) / std::abs(cplx{2.0 + P, -Q});
}

double push_sup_K(const Push& p) {
  const int nx = 400, ny = 200;
  struct Best {
    double mu, x, y;
  };
  std::vector<Best> top;
  for (int i = 0; i <= nx; ++i) {
    double x = -p.width + 2.0 * p.width * i / nx;
    for (int j = 0; j <= ny; ++j) {
      double y = kPi * j / ny;
      top.push_back({push_mu(p, x, y), x, y});
    }
  }
  std::partial_sort(top.begin(), top.begin() + 8, top.end(), [](const Best& u, const Best& v) { return u.mu > v.mu; });
  double best = top[0].mu;
  // pattern search around the best grid points
  for (int k = 0; k < 8; ++k) {
    double x = top[k].x, y = top[k].y, m = top[k].mu;
    double hx = 2.0 * p.width / nx, hy = kPi / ny;
    while (hx > 1e-12 * p.width) {
      bool moved = false;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        double xn = std::clamp(x + dx * hx, -p.width, p.width), yn = std::clamp(y + dy * hy, 0.0, kPi);
        double mn = push_mu(p, xn, yn);
        if (mn > m) {
          m = mn;
          x = xn;
          y = yn;
          moved = true;
        }
      }
      if (!moved) {
        hx *= 0.5;
        hy *= 0.5;
      }
    }
    best = std::max(best, m);
  }
  return (1.0 + best) / (1.0 - best);
}

}  // namespace

struct QcMap::Impl {
  std::variant<Identity, RadialPower, Twist, Push, Affine, PowerLift, Composite> v;
};

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cplx radial_forward(const RadialPower& m, cplx z) {
  double r = std::abs(z);
  if (r >= m.R) return z;
  if (r >= m.r_in) return z * std::pow(r / m.R, m.a - 1.0);
  return z * std::pow(m.r_in / m.R, m.a - 1.0);
}

cplx radial_inverse(const RadialPower& m, cplx w) {
  double s = std::abs(w);
  if (s >= m.R) return w;
  double edge = m.R * std::pow(m.r_in / m.R, m.a);
  if (s >= edge) {
    double r = m.R * std::pow(s / m.R, 1.0 / m.a);
    return w * (r / s);
  }
  return w / std::pow(m.r_in / m.R, m.a - 1.0);
}

double twist_fraction(const Twist& t, double r) {
  if (r <= t.r) return 0.0;
  if (r >= t.R) return 1.0;
  return std::log(r / t.r) / std::log(t.R / t.r);
}

// disk coordinate -> strip coordinate of the push model, and back
cplx push_to_strip(const Push& p, cplx z) {
  cplx w = std::conj(p.rot) * (z - p.a) / (1.0 - std::conj(p.a) * z);
  cplx h = kI * (1.0 + w) / (1.0 - w);
  return std::log(h);
}

cplx push_from_strip(const Push& p, cplx s) {
  cplx h = std::exp(s);
  cplx w = (h - kI) / (h + kI);
  cplx u = p.rot * w;
  return (u + p.a) / (1.0 + std::conj(p.a) * u);
}

cplx shear(const Push& p, cplx s) {
  return {s.real() + p.ell * bump(p, s.real()) * std::sin(s.imag()), s.imag()};
}

cplx shear_inverse(const Push& p, cplx s) {
  double X = s.real(), y = s.imag(), sy = std::sin(y);
  if (sy <= 0.0) return s;
  // h(x) = x + l g(x) sin y is increasing with h(x) - x in [0, l]
  double lo = X - p.ell, hi = X, x = X;
  for (int it = 0; it < 200; ++it) {
    double hx = x + p.ell * bump(p, x) * sy - X;
    if (std::fabs(hx) <= 1e-15 * (1.0 + std::fabs(X))) break;
    if (hx > 0.0)
      hi = x;
    else
      lo = x;
    double d = 1.0 + p.ell * bump_d(p, x) * sy;
    double xn = x - hx / d;
    x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * (1.0 + std::fabs(X))) break;
  }
  return {x, y};
}

cplx push_apply(const Push& p, cplx z, bool inverse) {
  cplx u = z / p.radius;
  if (std::abs(u) >= 1.0) return z;
  cplx s = push_to_strip(p, u);
  cplx t = inverse ? shear_inverse(p, s) : shear(p, s);
  return push_from_strip(p, t) * p.radius;
}

double affine_K(const double* m) {
  // singular values of [[m0, m1], [m2, m3]]
  double a = m[0], b = m[1], c = m[2], d = m[3];
  double s = a * a + b * b + c * c + d * d, det = a * d - b * c;
  double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det * det));
  double s1 = std::sqrt(0.5 * (s + disc)), s2 = std::sqrt(std::max(0.0, 0.5 * (s - disc)));
  return s1 / s2;
}

}  // namespace

QcMap QcMap::identity() { return QcMap(std::make_shared<Impl>(Impl{Identity{}})); }

QcMap QcMap::radial_stretch(double rho, double t) {
  if (!(t > 0.0) || !(t <= rho) || !(rho < 1.0))
    fail(ErrorKind::DomainError, "radial_stretch needs 0 < t <= rho < 1", {rho, t});
  if (t == rho) return radial_power(rho, 1.0, 1.0);
  return radial_power(rho, 1.0, std::log(t) / std::log(rho));
}

QcMap QcMap::radial_power(double r_in, double R, double a) {
  if (!(r_in > 0.0) || !(R > r_in) || !(a > 0.0) || !std::isfinite(a))
    fail(ErrorKind::DomainError, "radial_power needs 0 < r_in < R and a > 0", {r_in, R}, a);
  return QcMap(std::make_shared<Impl>(Impl{RadialPower{r_in, R, a}}));
}

QcMap QcMap::annulus_twist(double theta, double r, double R) {
  if (!(r > 0.0) || !(R > r)) fail(ErrorKind::DomainError, "annulus_twist needs 0 < r < R", {r, R});
  return QcMap(std::make_shared<Impl>(Impl{Twist{theta, r, R}}));
}

QcMap QcMap::push_point_in_disk(cplx a, cplx b, double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::DomainError, "push disk radius must be positive", {}, radius);
  cplx ua = a / radius, ub = b / radius;
  if (!(std::abs(ua) < 1.0) || !(std::abs(ub) < 1.0)) fail(ErrorKind::DomainError, "push endpoints must lie in the disk", a);
  if (a == b) return identity();
  cplx tb = (ub - ua) / (1.0 - std::conj(ua) * ub);
  double r2 = std::abs(tb);
  Push p;
  p.a = ua;
  p.b = ub;
  p.radius = radius;
  p.rot = tb / r2;
  p.ell = std::log1p(r2) - std::log1p(-r2);
  p.width = 2.5 * p.ell + 1.0;
  p.K = push_sup_K(p);
  return QcMap(std::make_shared<Impl>(Impl{p}));
}

QcMap QcMap::affine(double a11, double a12, double a21, double a22) {
  double det = a11 * a22 - a12 * a21;
  if (!(det > 0.0)) fail(ErrorKind::DomainError, "affine map must preserve orientation", {}, det);
  Affine A{{a11, a12, a21, a22}, {a22 / det, -a12 / det, -a21 / det, a11 / det}, 0.0};
  A.K = affine_K(A.m);
  return QcMap(std::make_shared<Impl>(Impl{A}));
}

QcMap QcMap::power_lift(const QcMap& psi, int d) {
  if (d < 1) fail(ErrorKind::DomainError, "power_lift degree must be positive", {}, d);
  return QcMap(std::make_shared<Impl>(Impl{PowerLift{{psi}, d}}));
}

QcMap QcMap::composite(std::vector<QcMap> maps) {
  return QcMap(std::make_shared<Impl>(Impl{Composite{std::move(maps)}}));
}

QcMap QcMap::conjugate(const QcMap& phi, const QcMap& psi) { return composite({phi.inverse(), psi, phi}); }

QcMap QcMap::inverse() const { return QcMap(impl_, !inverted_); }

cplx QcMap::operator()(cplx z) const {
  const bool inv = inverted_;
  return std::visit(
      overloaded{
          [&](const Identity&) { return z; },
          [&](const RadialPower& m) { return inv ? radial_inverse(m, z) : radial_forward(m, z); },
          [&](const Twist& t) { return z * std::polar(1.0, (inv ? -t.theta : t.theta) * twist_fraction(t, std::abs(z))); },
          [&](const Push& p) { return push_apply(p, z, inv); },
          [&](const Affine& A) {
            const double* m = inv ? A.inv : A.m;
            return cplx{m[0] * z.real() + m[1] * z.imag(), m[2] * z.real() + m[3] * z.imag()};
          },
          [&](const PowerLift& L) {
            if (!inv) {
              cplx w = L.inner[0](z);
              double s = std::abs(w);
              return s == 0.0 ? w : w * std::pow(s, 1.0 / L.d - 1.0);
            }
            double s = std::abs(z);
            cplx w = s == 0.0 ? z : z * std::pow(s, L.d - 1.0);
            return L.inner[0].apply_inverse(w);
          },
          [&](const Composite& c) {
            cplx w = z;
            if (!inv)
              for (const auto& m : c.maps) w = m(w);
            else
              for (auto it = c.maps.rbegin(); it != c.maps.rend(); ++it) w = it->apply_inverse(w);
            return w;
          }},
      impl_->v);
}

cplx QcMap::apply_inverse(cplx w) const { return inverse()(w); }

std::string QcMap::kind() const {
  static const char* names[] = {"identity", "radial", "twist", "push", "affine", "power-lift", "composite"};
  std::string k = names[impl_->v.index()];
  return inverted_ ? k + "^-1" : k;
}

std::optional<double> QcMap::closed_form_K() const {
  return std::visit(overloaded{[](const Identity&) -> std::optional<double> { return 1.0; },
                               [](const RadialPower& m) -> std::optional<double> { return std::max(m.a, 1.0 / m.a); },
                               [](const Twist& t) -> std::optional<double> {
                                 double c = t.theta / std::log(t.R / t.r);
                                 return (2.0 + c * c + std::fabs(c) * std::sqrt(c * c + 4.0)) / 2.0;
                               },
                               [](const Push&) -> std::optional<double> { return std::nullopt; },
                               [](const Affine& A) -> std::optional<double> { return A.K; },
                               [](const PowerLift&) -> std::optional<double> { return std::nullopt; },
                               [](const Composite&) -> std::optional<double> { return std::nullopt; }},
                    impl_->v);
}

double QcMap::K_estimate() const {
  if (auto k = closed_form_K()) return *k;
  return std::visit(overloaded{[](const Push& p) { return p.K; },
                               [](const PowerLift& L) { return L.d * L.inner[0].K_estimate(); },
                               [](const Composite& c) {
                                 double k = 1.0;
                                 for (const auto& m : c.maps) k *= m.K_estimate();
                                 return k;
                               },
                               [](const auto&) { return 1.0; }},
                    impl_->v);
}

}  // namespace thk
