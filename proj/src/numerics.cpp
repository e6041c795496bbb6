#include "thk/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace thk {

cplx poly_eval(const Poly& p, cplx z) {
  cplx acc{};
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly poly_deriv(const Poly& p) {
  if (p.size() <= 1) return {cplx{}};
  Poly d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
  return d;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly s(std::max(a.size(), b.size()));
  for (std::size_t k = 0; k < a.size(); ++k) s[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) s[k] += b[k];
  return s;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {cplx{}};
  Poly s(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) s[i + j] += a[i] * b[j];
  return s;
}

Poly poly_trim(Poly p) {
  while (p.size() > 1 && p.back() == cplx{}) p.pop_back();
  if (p.empty()) p.push_back(cplx{});
  return p;
}

int poly_degree(const Poly& p) {
  for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
    if (p[k] != cplx{}) return k;
  return -1;
}

std::vector<cplx> poly_roots(const Poly& p) {
  int n = poly_degree(p);
  if (n <= 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / p[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  // polish with a few Newton steps on the original polynomial
  Poly dp = poly_deriv(p);
  for (auto& r : roots) {
    for (int it = 0; it < 4; ++it) {
      cplx d = poly_eval(dp, r);
      if (d == cplx{}) break;
      r -= poly_eval(p, r) / d;
    }
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

double poly_abs_bound(const Poly& p, double r) {
  double s = 0.0, rk = 1.0;
  for (const auto& c : p) {
    s += std::abs(c) * rk;
    rk *= r;
  }
  return s;
}

namespace {

const double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<cplx(double)>& f, double a, double b, cplx& res, double& err) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fc = f(c);
  cplx rk = fc * kWgk[7];
  cplx rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    cplx f1 = f(c - x), f2 = f(c + x);
    rk += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) rg += (f1 + f2) * kWg[j / 2];
  }
  res = rk * h;
  err = std::abs((rk - rg) * h);
}

void recurse(const std::function<cplx(double)>& f, double a, double b, cplx whole, double tol_abs,
             int depth, int max_depth, QuadResult& out) {
  cplx r;
  double e;
  gk15(f, a, b, r, e);
  out.evals += 15;
  if (e <= tol_abs || depth >= max_depth || e <= 1e-15 * std::abs(r)) {
    if (e > tol_abs && e > 1e-15 * std::abs(r)) out.converged = false;
    out.value += r;
    out.error += e;
    return;
  }
  double m = 0.5 * (a + b);
  recurse(f, a, m, whole, 0.5 * tol_abs, depth + 1, max_depth, out);
  recurse(f, m, b, whole, 0.5 * tol_abs, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
                        int max_depth) {
  QuadResult out;
  out.value = {};
  cplx whole;
  double e;
  gk15(f, a, b, whole, e);
  // Scale for the relative tolerance: the coarse estimate, floored by the
  // integral of |f| sampled at the Kronrod nodes so cancellation cannot make
  // the target unreachable.
  double scale = std::abs(whole);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double absint = std::abs(f(c)) * kWgk[7];
  for (int j = 0; j < 7; ++j) absint += (std::abs(f(c - h * kXgk[j])) + std::abs(f(c + h * kXgk[j]))) * kWgk[j];
  absint *= std::fabs(h);
  scale = std::max(scale, 1e-3 * absint);
  double tol_abs = std::max(rel_tol * scale, 1e-300);
  recurse(f, a, b, whole, tol_abs, 0, max_depth, out);
  out.evals += 30;
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace thk
