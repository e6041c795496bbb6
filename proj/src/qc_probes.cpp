#include "thk/qc_probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "thk/cyl_area.hpp"
#include "thk/modulus.hpp"

namespace thk {

long long twist_bound(cplx p, double K, double C, BoundConvention conv) {
  if (!(std::abs(p) > 2.0)) fail(ErrorKind::DomainError, "twist_bound needs |p| > 2", p);
  if (!(K >= 1.0) || !(C > 0.0)) fail(ErrorKind::DomainError, "twist_bound needs K >= 1 and C > 0", {K, C});
  double lp = std::log(std::abs(p));
  double bound = lp / kTwoPi * std::pow(K, 1.0 / C);
  double nearest = std::round(bound);
  if (std::fabs(bound - nearest) <= 1e-12 * std::max(1.0, bound)) {
    return conv == BoundConvention::Floor ? static_cast<long long>(nearest) : static_cast<long long>(nearest) - 1;
  }
  return static_cast<long long>(std::floor(bound));
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double signed_area(const Polyline& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * s;
}

double seg_dist(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::norm(d) > 0.0 ? std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0) : 0.0;
  return std::abs(p - (a + t * d));
}

cplx closest_on_segment(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::norm(d) > 0.0 ? std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0) : 0.0;
  return a + t * d;
}

struct Polygon {
  Polyline v;
  double scale;

  bool inside_or_on(cplx z) const {
    const double tol = 1e-12 * scale;
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      if (seg_dist(z, v[j], v[i]) <= tol) return true;
      if ((v[i].imag() > z.imag()) != (v[j].imag() > z.imag())) {
        double x = v[j].real() + (z.imag() - v[j].imag()) * (v[i].real() - v[j].real()) / (v[i].imag() - v[j].imag());
        if (z.real() < x) in = !in;
      }
    }
    return in;
  }

  // closed segment pq lies in the closed polygon
  bool visible(cplx p, cplx q) const {
    const double eps = 1e-12 * scale * scale;
    cplx d = q - p;
    double len2 = std::norm(d);
    if (len2 == 0.0) return inside_or_on(p);
    std::vector<double> ts{0.0, 1.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
      cplx a = v[i], b = v[(i + 1) % v.size()];
      double o1 = cross(d, a - p), o2 = cross(d, b - p);
      double o3 = cross(b - a, p - a), o4 = cross(b - a, q - a);
      if (((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) && ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps)))
        return false;
      for (cplx e : {a, b}) {
        double t = ((e - p) * std::conj(d)).real() / len2;
        if (t > 0.0 && t < 1.0 && std::abs(p + t * d - e) <= 1e-12 * scale) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if (ts[k + 1] - ts[k] < 1e-14) continue;
      if (!inside_or_on(p + 0.5 * (ts[k] + ts[k + 1]) * d)) return false;
    }
    return true;
  }
};

Polyline sample_chain(const Polyline& chain, double spacing) {
  Polyline out;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    double L = std::abs(chain[i + 1] - chain[i]);
    int n = std::max(1, static_cast<int>(std::ceil(L / spacing)));
    for (int k = 0; k < n; ++k) out.push_back(chain[i] + (chain[i + 1] - chain[i]) * (static_cast<double>(k) / n));
  }
  out.push_back(chain.back());
  return out;
}

bool segments_touch(cplx a, cplx b, cplx c, cplx d) {
  auto orient = [](cplx p, cplx q, cplx r) {
    double x = cross(q - p, r - p);
    return (x > 0) - (x < 0);
  };
  auto on_seg = [](cplx p, cplx q, cplx r) {
    return std::min(p.real(), q.real()) <= r.real() && r.real() <= std::max(p.real(), q.real()) &&
           std::min(p.imag(), q.imag()) <= r.imag() && r.imag() <= std::max(p.imag(), q.imag());
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_seg(a, b, c)) || (o2 == 0 && on_seg(a, b, d)) || (o3 == 0 && on_seg(c, d, a)) ||
         (o4 == 0 && on_seg(c, d, b));
}

}  // namespace

double inner_distance(const Polyline& polygon, const Polyline& chain_a, const Polyline& chain_b) {
  double scale = 0.0;
  for (cplx z : polygon) scale = std::max(scale, std::abs(z - polygon[0]));
  Polygon P{polygon, std::max(scale, 1e-300)};
  const std::size_t n = polygon.size();

  double perim = 0.0;
  for (std::size_t i = 0; i < n; ++i) perim += std::abs(polygon[(i + 1) % n] - polygon[i]);
  double spacing = perim / 1600.0;

  std::vector<cplx> reflex;
  for (std::size_t i = 0; i < n; ++i) {
    cplx a = polygon[(i + n - 1) % n], b = polygon[i], c = polygon[(i + 1) % n];
    if (cross(b - a, c - b) < 0.0) reflex.push_back(b);
  }
  Polyline sources = sample_chain(chain_a, spacing);
  for (cplx r : reflex)
    for (std::size_t i = 0; i + 1 < chain_a.size(); ++i) sources.push_back(closest_on_segment(r, chain_a[i], chain_a[i + 1]));
  Polyline targets = sample_chain(chain_b, spacing);

  // nodes: sources, then reflex vertices
  const std::size_t ns = sources.size(), nr = reflex.size();
  std::vector<double> dist(ns + nr, std::numeric_limits<double>::infinity());
  auto node = [&](std::size_t k) { return k < ns ? sources[k] : reflex[k - ns]; };
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (std::size_t k = 0; k < ns; ++k) {
    dist[k] = 0.0;
    pq.push({0.0, k});
  }
  double best = std::numeric_limits<double>::infinity();
  while (!pq.empty()) {
    auto [d, k] = pq.top();
    pq.pop();
    if (d > dist[k] || d >= best) continue;
    cplx u = node(k);
    // finish on the target chain: closest points, then samples
    for (std::size_t i = 0; i + 1 < chain_b.size(); ++i) {
      cplx c = closest_on_segment(u, chain_b[i], chain_b[i + 1]);
      double e = d + std::abs(c - u);
      if (e < best && P.visible(u, c)) best = e;
    }
    for (cplx t : targets) {
      double e = d + std::abs(t - u);
      if (e < best && P.visible(u, t)) best = e;
    }
    for (std::size_t r = 0; r < nr; ++r) {
      std::size_t kk = ns + r;
      double e = d + std::abs(reflex[r] - u);
      if (e < dist[kk] && e < best && P.visible(u, reflex[r])) {
        dist[kk] = e;
        pq.push({e, kk});
      }
    }
  }
  return best;
}

RengelBounds rengel_bounds(const Quadrilateral& q) {
  const auto& v = q.boundary;
  const int n = static_cast<int>(v.size());
  if (n < 4) fail(ErrorKind::InvalidQuadrilateral, "quadrilateral needs at least 4 boundary vertices");
  for (int k = 0; k < 4; ++k)
    if (q.vertex[k] < 0 || q.vertex[k] >= n || (k > 0 && q.vertex[k] <= q.vertex[k - 1]))
      fail(ErrorKind::InvalidQuadrilateral, "marked vertices must be increasing boundary indices");
  for (int i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) fail(ErrorKind::InvalidQuadrilateral, "repeated boundary vertex", v[i]);
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(v[i], v[i + 1], v[j], v[(j + 1) % n]))
        fail(ErrorKind::InvalidQuadrilateral, "self-intersecting boundary", v[j]);
    }
  }
  RengelBounds out;
  out.area = signed_area(v);
  if (!(out.area > 0.0)) fail(ErrorKind::InvalidQuadrilateral, "boundary must be positively oriented", {}, out.area);
  auto chain = [&](int from, int to) {
    Polyline c;
    for (int i = from;; i = (i + 1) % n) {
      c.push_back(v[i]);
      if (i == to) break;
    }
    return c;
  };
  Polyline a1 = chain(q.vertex[0], q.vertex[1]), b1 = chain(q.vertex[1], q.vertex[2]);
  Polyline a2 = chain(q.vertex[2], q.vertex[3]), b2 = chain(q.vertex[3], q.vertex[0]);
  out.s_a = inner_distance(v, a1, a2);
  out.s_b = inner_distance(v, b1, b2);
  out.lower = out.s_b * out.s_b / out.area;
  out.upper = out.area / (out.s_a * out.s_a);
  return out;
}

QcMap probe_map(double kappa, double r0) {
  if (!(kappa >= 0.0) || !(r0 > 0.0)) fail(ErrorKind::DomainError, "probe needs kappa >= 0 and r0 > 0", {}, kappa);
  return QcMap::radial_power(r0, 2.0 * r0, 1.0 + kappa / std::log(2.0));
}

std::vector<ProbeRow> distortion_probe(const std::vector<double>& kappas, double r0) {
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] >= 0.0)) fail(ErrorKind::DomainError, "kappa must be nonnegative", {}, kappas[i]);
    if (i > 0 && !(kappas[i] < kappas[i - 1])) fail(ErrorKind::DomainError, "kappas must be decreasing", {}, kappas[i]);
  }
  std::vector<ProbeRow> rows;
  for (double kappa : kappas) {
    QcMap phi = probe_map(kappa, r0);
    ProbeRow row;
    row.kappa = kappa;
    double a = 1.0 + kappa / std::log(2.0);
    row.closed_form = std::fabs((a - 1.0) * std::log(2.0));
    for (int k = 1; k < 32; ++k) {
      double r = 0.25 * r0 * k / 32.0;
      for (int j = 0; j < 64; ++j) {
        cplx z = std::polar(r, kTwoPi * j / 64.0);
        row.displacement = std::max(row.displacement, cyl_dist(phi(z), z));
      }
    }
    // grid lines fall on the interface circles r0 and 2 r0
    auto field = measure_dilatation([&](cplx z) { return phi(z); }, GridSpec::log_polar(0.5 * r0, 4.0 * r0, 60, 64));
    row.measured_integral = field.cylindrical_integral;
    rows.push_back(row);
  }
  return rows;
}

ModulusCheck modulus_difference_check(const QcMap& map, double r, double R) {
  double mod = annulus_modulus(r, R);
  auto circle_radius = [&](double s) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    const int n = 64;
    for (int j = 0; j < n; ++j) {
      double m = std::abs(map(std::polar(s, kTwoPi * j / n)));
      lo = std::min(lo, m);
      hi = std::max(hi, m);
      sum += m;
    }
    double mean = sum / n;
    if (hi - lo > 1e-9 * mean) fail(ErrorKind::Unsupported, "image of the annulus is not round", {lo, hi});
    return mean;
  };
  ModulusCheck out;
  out.lhs = std::fabs(std::log(circle_radius(R) / circle_radius(r)) - mod);
  auto field = measure_dilatation([&](cplx z) { return map(z); }, GridSpec::log_polar(r, R, 128, 128));
  out.rhs = field.cylindrical_integral;
  out.excluded = field.excluded;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-6) + 1e-12;
  return out;
}

double max_over_min_ratio(const QcMap& map, double radius, int samples) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int j = 0; j < samples; ++j) {
    double m = std::abs(map(std::polar(radius, kTwoPi * j / samples)));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi / lo;
}

}  // namespace thk
