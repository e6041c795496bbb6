#include "thk/spider.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thk/qc_maps.hpp"

namespace thk {

LogVal LogVal::from_ln(double ln) {
  LogVal v;
  v.ln_ = ln;
  v.overflow_ = !std::isfinite(ln);
  return v;
}

LogVal LogVal::of(double x) {
  if (!(x > 0.0)) fail(ErrorKind::DomainError, "LogVal needs a positive value", {}, x);
  return from_ln(std::log(x));
}

LogVal KLedger::bound() const { return base.pow(std::pow(beta, exponent_power)) * omega_factor; }

double ln_omega_factor(const OrbitSpec& o, std::size_t i, std::size_t j, double beta) {
  double s = 0.0;
  for (std::size_t k = j; k < o.orbits.at(i).size(); ++k) {
    int w = o.omega(i, k);
    if (w > 1) s += std::pow(beta, static_cast<double>(k - j + 1)) * std::log(static_cast<double>(w));
  }
  return s;
}

KLedger closed_form_ledger(const StructureParams& p, const OrbitSpec& o, std::size_t i, std::size_t j, int n_inside,
                           const SpiderConstants& c) {
  KLedger L;
  L.beta = c.beta;
  L.base = LogVal::of(c.B * p.K1 * p.K0 * p.K0);
  L.exponent_power = n_inside - 1 - static_cast<int>(j);
  L.omega_factor = LogVal::from_ln(ln_omega_factor(o, i, j, c.beta));
  return L;
}

// ---------------------------------------------------------------------------
// words

Word reduce_word(const Word& w) {
  Word out;
  for (int t : w) {
    if (!out.empty() && out.back() == -t)
      out.pop_back();
    else
      out.push_back(t);
  }
  return out;
}

namespace {

double seg_dist(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::norm(d) > 0.0 ? std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0) : 0.0;
  return std::abs(p - (a + t * d));
}

}  // namespace

Word homotopy_word(const Polyline& path, const Polyline& marked) {
  Word w;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    cplx p = path[s], q = path[s + 1];
    std::vector<std::pair<double, int>> hits;
    for (std::size_t k = 0; k < marked.size(); ++k) {
      cplx m = marked[k];
      double scale = std::max({1.0, std::abs(m), std::abs(p), std::abs(q)});
      if (seg_dist(m, p, q) <= 1e-12 * scale) fail(ErrorKind::DegeneratePath, "path runs through a marked point", m);
      bool left_p = p.real() < m.real(), left_q = q.real() < m.real();
      if (left_p == left_q) continue;
      double t = (m.real() - p.real()) / (q.real() - p.real());
      double y = p.imag() + t * (q.imag() - p.imag());
      if (y > m.imag()) hits.push_back({t, left_p ? static_cast<int>(k + 1) : -static_cast<int>(k + 1)});
    }
    std::sort(hits.begin(), hits.end());
    for (auto& h : hits) w.push_back(h.second);
  }
  return reduce_word(w);
}

Word leg_word(const Polyline& path, const Polyline& marked) {
  if (path.empty()) return {};
  double R = 1.0;
  for (cplx z : path) R = std::max(R, std::abs(z));
  for (cplx z : marked) R = std::max(R, std::abs(z));
  Polyline ext = path;
  cplx e = path.back();
  if (std::abs(e) > 0.0) ext.push_back(e * (2.0 * R / std::abs(e)));
  return homotopy_word(ext, marked);
}

Polyline semi_project(const Polyline& path, double rho) {
  if (path.empty()) return {};
  if (!(rho > 0.0)) fail(ErrorKind::DomainError, "semi_project needs rho > 0", {}, rho);
  if (!(std::abs(path.front()) < rho)) fail(ErrorKind::DomainError, "path must start inside the disk", path.front());
  Polyline out;
  out.reserve(path.size());
  for (cplx z : path) {
    double r = std::abs(z);
    out.push_back(r > rho ? z * (rho / r) : z);
  }
  cplx& e = out.back();
  if (std::fabs(std::abs(e) - rho) <= 1e-9 * rho) e *= rho / std::abs(e);
  return out;
}

// ---------------------------------------------------------------------------
// regularity shifts

namespace {

// log f continued along the segment from z0 (where it equals F0) to z1.
cplx continue_log(const EntireMap& f, cplx z0, cplx F0, cplx z1) {
  for (int n = 64; n <= (1 << 18); n *= 4) {
    cplx F = F0;
    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      cplx v = f.log_eval(z0 + (z1 - z0) * (static_cast<double>(k) / n));
      double shift = std::round((F.imag() - v.imag()) / kTwoPi);
      cplx next = v + kI * (kTwoPi * shift);
      if (std::fabs(next.imag() - F.imag()) > 0.5) ok = false;
      F = next;
    }
    if (ok) return F;
  }
  fail(ErrorKind::NumericalFailure, "could not continue log f along the segment", z1);
}

double dist_to(cplx p, const Polyline& Y) {
  double d = std::numeric_limits<double>::infinity();
  for (cplx y : Y) d = std::min(d, std::abs(p - y));
  return d;
}

struct Obstacle {
  cplx z;  // plane position
  cplx y;  // log f coordinate
  bool in_T;
};

// Horizontal corridor from v0 of length L. A cluster of obstacles within eps
// of the current line is passed at distance eps on its nearer side and the
// corridor stays on the offset line afterwards, so corridors started at
// different heights never merge.
Polyline corridor(cplx v0, double L, const std::vector<Obstacle>& obs, double eps) {
  std::vector<cplx> ys;
  for (const auto& o : obs) ys.push_back(o.y);
  std::sort(ys.begin(), ys.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  const double h = eps * (1.0 + 1e-9), end = v0.real() + L;
  Polyline zeta{v0};
  double cur = v0.imag(), x = v0.real();
  auto in_band = [&](cplx y) { return y.real() > x && y.real() < end && std::fabs(y.imag() - cur) < h; };
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (!in_band(ys[k])) continue;
    double lo = ys[k].real(), hi = lo, top = std::max(cur, ys[k].imag()), bottom = std::min(cur, ys[k].imag());
    for (std::size_t e = k + 1; e < ys.size() && ys[e].real() - h <= hi + h; ++e) {
      if (!in_band(ys[e])) continue;
      hi = std::max(hi, ys[e].real());
      top = std::max(top, ys[e].imag());
      bottom = std::min(bottom, ys[e].imag());
      k = e;
    }
    double above = top + h, below = bottom - h;
    double next = (above - cur <= cur - below) ? above : below;
    double x0 = std::max(lo - h, x);
    zeta.push_back({x0, cur});
    zeta.push_back({x0, next});
    cur = next;
    x = hi + h;
  }
  zeta.push_back({end, cur});
  return zeta;
}

double hyperbolic_distance(cplx a, cplx b) {
  return 2.0 * std::atanh(std::abs(a - b) / std::abs(1.0 - std::conj(a) * b));
}

cplx nearest(cplx p, const Polyline& Y) {
  cplx best = Y.front();
  for (cplx y : Y)
    if (std::abs(p - y) < std::abs(p - best)) best = y;
  return best;
}

}  // namespace

RegularityShift regularity_shift(const EntireMap& f, double rho, const Polyline& X, cplx x,
                                 const RegularityOptions& opt) {
  if (!(rho > 1.0)) fail(ErrorKind::DomainError, "regularity shift needs rho > 1", {}, rho);
  if (!(opt.eps > 0.0 && opt.eps < 1.0)) fail(ErrorKind::DomainError, "eps must lie in (0, 1)", {}, opt.eps);
  const double lr = std::log(rho), eps = opt.eps;
  const double left = lr - std::log(2.0);  // log f coordinate of the boundary of the rho/2 tract

  double lfx = f.log_abs(x);
  bool marked = false;
  for (cplx m : X)
    if (std::abs(m - x) <= 1e-12 * std::max(1.0, std::abs(x))) marked = true;
  bool on_boundary = std::fabs(lfx - lr) <= 1e-9 * std::max(1.0, lr);
  if (!(std::abs(x) < rho * (1.0 + 1e-12))) fail(ErrorKind::DomainError, "start point must lie in the disk", x);
  if (!on_boundary && !(marked && lfx > lr))
    fail(ErrorKind::DomainError, "start point must lie on the tract boundary or be a marked point in the tract", x);
  auto label = f.tract_label(x, 0.5 * rho);
  cplx v0 = f.log_eval(x);

  std::vector<Obstacle> obs;
  for (cplx m : X) {
    if (std::abs(m - x) <= 1e-12 * std::max(1.0, std::abs(x))) continue;
    if (!(std::abs(m) < rho * std::exp(eps))) continue;
    if (f.tract_label(m, 0.5 * rho) != label) continue;
    obs.push_back({m, continue_log(f, x, v0, m), f.log_abs(m) > lr && std::abs(m) < rho});
  }
  // hypotheses on the marked points of the tract
  std::vector<std::pair<cplx, cplx>> checked;  // (plane, log coordinate)
  if (marked) checked.push_back({x, v0});
  for (const auto& o : obs)
    if (o.in_T) checked.push_back({o.z, o.y});
  for (std::size_t a = 0; a < checked.size(); ++a) {
    if (!(checked[a].second.real() > lr + eps))
      fail(ErrorKind::RegularityHypothesisFailed, "marked point too close to the tract boundary: " + fmt_cplx(checked[a].first),
           checked[a].first, checked[a].second.real() - lr);
    for (std::size_t b = a + 1; b < checked.size(); ++b)
      if (!(std::abs(checked[a].second - checked[b].second) >= eps))
        fail(ErrorKind::RegularityHypothesisFailed,
             "marked points " + fmt_cplx(checked[a].first) + " and " + fmt_cplx(checked[b].first) +
                 " are closer than eps in log coordinates",
             checked[a].first, std::abs(checked[a].second - checked[b].second));
  }

  // corridor long enough to leave the disk
  RegularityShift out;
  Polyline Y;
  for (const auto& o : obs) Y.push_back(o.y);
  double L = std::max(1.0, rho - v0.real());
  for (int attempt = 0;; ++attempt) {
    if (attempt == 40) fail(ErrorKind::NumericalFailure, "corridor never reaches the circle", x);
    Polyline zeta = corridor(v0, L, obs, eps);
    LiftResult lift = lift_log_path(f, zeta, x);
    std::size_t k = 1;
    while (k < lift.z.size() && std::abs(lift.z[k]) < rho) ++k;
    if (k == lift.z.size()) {
      L *= 4.0;
      continue;
    }
    cplx a = lift.z[k - 1], d = lift.z[k] - a;
    // |a + t d| = rho
    double A = std::norm(d), Bq = 2.0 * (a * std::conj(d)).real(), C = std::norm(a) - rho * rho;
    double t = (-Bq + std::sqrt(std::max(0.0, Bq * Bq - 4.0 * A * C))) / (2.0 * A);
    cplx exit = a + t * d;
    exit *= rho / std::abs(exit);
    out.path.assign(lift.z.begin(), lift.z.begin() + static_cast<std::ptrdiff_t>(k));
    out.path.push_back(exit);
    // corridor up to the exit
    std::size_t v = 0;
    while (v + 1 < lift.vertex_index.size() && lift.vertex_index[v + 1] <= k - 1) ++v;
    out.log_path.assign(zeta.begin(), zeta.begin() + static_cast<std::ptrdiff_t>(v + 1));
    if (v + 1 < zeta.size()) {
      cplx P = zeta[v], Q = zeta[v + 1];
      cplx ye = continue_log(f, lift.z[lift.vertex_index[v]], P, exit);
      double s = std::clamp(((ye - P) * std::conj(Q - P)).real() / std::norm(Q - P), 0.0, 1.0);
      out.log_path.push_back(P + s * (Q - P));
    }
    break;
  }
  for (std::size_t i = 0; i + 1 < out.log_path.size(); ++i)
    for (cplx y : Y)
      if (seg_dist(y, out.log_path[i], out.log_path[i + 1]) < 0.25 * eps)
        fail(ErrorKind::RegularityHypothesisFailed, "corridor blocked near marked point", y);

  // disk pushes wherever the corridor comes within eps of a marked point
  double K = 1.0;
  for (std::size_t i = 0; i + 1 < out.log_path.size(); ++i) {
    cplx P = out.log_path[i], Q = out.log_path[i + 1];
    double len = std::abs(Q - P);
    if (len == 0.0) continue;
    cplx dir = (Q - P) / len;
    double s = 0.0;
    while (s < len) {
      cplx p = P + dir * s;
      double d = dist_to(p, Y);
      if (d >= eps * (1.0 - 1e-9)) {
        s += std::isfinite(d) ? std::max(d - eps, 0.01 * eps) : len;
        continue;
      }
      double ell = std::min({0.5 * d, 0.5 * (p.real() - left), len - s});
      cplx q = p + dir * ell;
      cplx m = 0.5 * (p + q);
      // disks pushed away from the nearest marked point approach a half-plane
      // and shorten the hyperbolic step
      cplx u = m - nearest(m, Y);
      u /= std::abs(u);
      cplx c = m;
      double R = 0.0, best = std::numeric_limits<double>::infinity();
      for (double t : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        cplx ct = m + u * (t * std::abs(m - nearest(m, Y)));
        double Rt = std::min(dist_to(ct, Y), ct.real() - left);
        if (!(std::abs(p - ct) < Rt && std::abs(q - ct) < Rt)) continue;
        double dh = hyperbolic_distance((p - ct) / Rt, (q - ct) / Rt);
        if (dh < best) best = dh, c = ct, R = Rt;
      }
      ShiftMove mv{p, q, c, R, QcMap::push_point_in_disk((p - c) / R, (q - c) / R).K_estimate()};
      K *= mv.K;
      out.moves.push_back(mv);
      s += ell;
    }
  }
  out.K = K;
  double m = static_cast<double>(X.size());
  out.bound = opt.C_reg * std::pow(lr, 2.0 * opt.d * (m + 1.0));
  out.within_bound = out.K <= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// spiders

const char* to_string(Prolongation p) {
  switch (p) {
    case Prolongation::Regularity: return "regularity";
    case Prolongation::SemiProjection: return "semi-projection";
    case Prolongation::LiftAndShift: return "lift-and-shift";
  }
  return "?";
}

namespace {

void validate(const StructureParams& p) {
  if (!(p.rho > 1.0)) fail(ErrorKind::DomainError, "rho must exceed 1", {}, p.rho);
  if (!(p.q > 0.0 && p.q < 0.5)) fail(ErrorKind::DomainError, "q must lie in (0, 1/2)", {}, p.q);
  if (!(p.eps > 0.0 && p.eps < 1.0)) fail(ErrorKind::DomainError, "eps must lie in (0, 1)", {}, p.eps);
  if (!(p.K0 >= 1.0 && p.K1 >= 1.0)) fail(ErrorKind::DomainError, "K0 and K1 must be at least 1");
}

struct Layout {
  std::vector<int> n_inside;
  Polyline feet;
  Polyline removed;
};

Layout layout(const StructureParams& p, const OrbitSpec& o) {
  Layout L;
  for (std::size_t i = 0; i < o.size(); ++i) {
    int n = count_inside(o, i, p.rho);
    for (int j = 0; j < static_cast<int>(o.orbits[i].size()); ++j) {
      bool in = std::abs(o.orbits[i][j]) < p.rho;
      if (in != (j < n)) fail(ErrorKind::DomainError, "orbit re-enters the disk after leaving it", o.orbits[i][j]);
      if (in && !(std::abs(o.orbits[i][j]) < p.q * p.rho))
        fail(ErrorKind::DomainError, "marked point inside the separating annulus", o.orbits[i][j]);
      (in ? L.feet : L.removed).push_back(o.orbits[i][j]);
    }
    if (n > 0 && n == static_cast<int>(o.orbits[i].size()))
      fail(ErrorKind::DomainError, "orbit must be computed past its last point in the disk", o.orbits[i].back());
    L.n_inside.push_back(n);
  }
  int N = static_cast<int>(L.feet.size());
  if (N == 2) fail(ErrorKind::Unsupported, "standard spiders need N(rho) != 2; add an auxiliary marked point");
  return L;
}

Polyline others(const Polyline& feet, cplx foot) {
  Polyline out;
  for (cplx z : feet)
    if (z != foot) out.push_back(z);
  return out;
}

// Points along arcs that run outside the disk, so the projection follows the circle.
Polyline densify_outside(const Polyline& path, double rho) {
  Polyline out{path.front()};
  for (std::size_t k = 1; k < path.size(); ++k) {
    cplx a = path[k - 1], b = path[k];
    if (std::abs(a) > rho || std::abs(b) > rho) {
      double gap = std::fabs(std::arg(b / a));
      int n = static_cast<int>(std::ceil(gap / 0.02));
      for (int s = 1; s < n; ++s) out.push_back(a + (b - a) * (static_cast<double>(s) / n));
    }
    out.push_back(b);
  }
  return out;
}

Leg regularity_leg(const EntireMap& f, const StructureParams& p, const OrbitSpec& o, const Layout& L, std::size_t i,
                   const SpiderConstants& c) {
  int j = L.n_inside[i] - 1;
  RegularityOptions ro{p.eps / 2.0, c.C_reg, growth_exponent(f).d};
  Leg leg;
  leg.orbit = static_cast<int>(i);
  leg.index = j;
  leg.foot = o.orbits[i][static_cast<std::size_t>(j)];
  RegularityShift sh = regularity_shift(f, p.rho, L.feet, leg.foot, ro);
  leg.path = sh.path;
  leg.shift_K = sh.K;
  leg.how = Prolongation::Regularity;
  leg.ledger = closed_form_ledger(p, o, i, static_cast<std::size_t>(j), L.n_inside[i], c);
  return leg;
}

Leg lifted_leg(const EntireMap& f, const StructureParams& p, const OrbitSpec& o, const Layout& L, std::size_t i,
               std::size_t j, const Leg& upper, const SpiderConstants& c) {
  Leg leg;
  leg.orbit = static_cast<int>(i);
  leg.index = static_cast<int>(j);
  leg.foot = o.orbits[i][j];
  Polyline path = upper.path;
  cplx fa = f.eval(leg.foot);
  if (std::abs(fa - path.front()) > 1e-9 * std::max(1.0, std::abs(fa))) {
    // captured orbit: undo the capture inside its support disk by a segment
    std::size_t k = 0;
    while (k < path.size() && std::abs(path[k]) < p.q * p.rho) ++k;
    Polyline fixed{fa};
    fixed.insert(fixed.end(), path.begin() + static_cast<std::ptrdiff_t>(k), path.end());
    path = std::move(fixed);
  }
  Polyline gamma = lift_path(f, path, leg.foot);
  cplx end = gamma.back();
  if (std::abs(end) >= p.rho * (1.0 - 1e-9)) {
    leg.path = semi_project(densify_outside(gamma, p.rho), p.rho);
    leg.how = Prolongation::SemiProjection;
  } else {
    RegularityOptions ro{p.eps / 2.0, c.C_reg, growth_exponent(f).d};
    RegularityShift sh = regularity_shift(f, p.rho, L.feet, end, ro);
    leg.path = gamma;
    leg.path.insert(leg.path.end(), sh.path.begin() + 1, sh.path.end());
    leg.shift_K = sh.K;
    leg.how = Prolongation::LiftAndShift;
  }
  leg.ledger = upper.ledger;
  leg.ledger.exponent_power += 1;
  double lw = std::log(static_cast<double>(o.omega(i, j)));
  leg.ledger.omega_factor = LogVal::from_ln(c.beta * (upper.ledger.omega_factor.ln() + lw));
  return leg;
}

void finish(FatSpider& s, const Layout& L) {
  for (auto& leg : s.legs) leg.word = leg_word(leg.path, others(L.feet, leg.foot));
  s.removed = L.removed;
}

}  // namespace

FatSpider standard_spider(const EntireMap& f, const StructureParams& p, const OrbitSpec& orbits,
                          const SpiderConstants& c) {
  validate(p);
  Layout L = layout(p, orbits);
  FatSpider s;
  s.inner_radius = p.q * p.rho;
  s.outer_radius = p.rho;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    int n = L.n_inside[i];
    if (n == 0) continue;
    std::vector<Leg> legs(static_cast<std::size_t>(n));
    legs.back() = regularity_leg(f, p, orbits, L, i, c);
    for (int j = n - 2; j >= 0; --j) {
      Leg up = legs[static_cast<std::size_t>(j + 1)];
      legs[static_cast<std::size_t>(j)] = lifted_leg(f, p, orbits, L, i, static_cast<std::size_t>(j), up, c);
      // the initial spider carries the closed-form ledger
      legs[static_cast<std::size_t>(j)].ledger = closed_form_ledger(p, orbits, i, static_cast<std::size_t>(j), n, c);
    }
    s.legs.insert(s.legs.end(), legs.begin(), legs.end());
  }
  finish(s, L);
  return s;
}

FatSpider pull_back_spider(const FatSpider& s, const EntireMap& f, const StructureParams& p, const OrbitSpec& orbits,
                           const SpiderConstants& c) {
  validate(p);
  Layout L = layout(p, orbits);
  if (s.legs.size() != L.feet.size()) fail(ErrorKind::DomainError, "spider does not match the marked orbits");
  auto find = [&](std::size_t i, int j) -> const Leg& {
    for (const auto& leg : s.legs)
      if (leg.orbit == static_cast<int>(i) && leg.index == j) return leg;
    fail(ErrorKind::DomainError, "spider is missing a leg");
  };
  FatSpider out;
  out.inner_radius = s.inner_radius;
  out.outer_radius = s.outer_radius;
  out.generation = s.generation + 1;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    int n = L.n_inside[i];
    for (int j = 0; j < n; ++j) {
      if (j == n - 1)
        out.legs.push_back(regularity_leg(f, p, orbits, L, i, c));
      else
        out.legs.push_back(lifted_leg(f, p, orbits, L, i, static_cast<std::size_t>(j), find(i, j + 1), c));
    }
  }
  finish(out, L);
  return out;
}

LogVal spider_map_bound(int n_legs, const LogVal& K, const SpiderConstants& c) {
  if (n_legs < 0) fail(ErrorKind::DomainError, "negative leg count", {}, n_legs);
  if (n_legs == 2) fail(ErrorKind::Unsupported, "the fat spider map bound fails for two legs");
  if (!(K.ln() >= 0.0)) fail(ErrorKind::DomainError, "K must be at least 1", {}, K.value());
  if (n_legs == 0) return LogVal::one();
  if (n_legs == 1) return LogVal::of(c.C_spider);
  return (LogVal::of(c.C_spider) * K).pow(c.nu * n_legs);
}

double lift_dilatation_bound(int d, double K) {
  if (d < 1) fail(ErrorKind::DomainError, "degree must be at least 1", {}, d);
  if (!(K >= 1.0)) fail(ErrorKind::DomainError, "K must be at least 1", {}, K);
  return d * K;
}

}  // namespace thk
