#include "thk/cyl_area.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "thk/numerics.hpp"

namespace thk {

CylPoint CylPoint::from(cplx z) {
  if (z == cplx{}) fail(ErrorKind::DomainError, "cylinder point at 0");
  double t = std::arg(z);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return {std::log(std::abs(z)), t};
}

cplx CylPoint::to_complex() const { return std::polar(std::exp(x), theta); }

double cyl_dist(cplx z, cplx w) {
  if (z == cplx{} || w == cplx{}) fail(ErrorKind::DomainError, "cyl_dist at 0", z == cplx{} ? z : w);
  double dx = std::log(std::abs(z)) - std::log(std::abs(w));
  return std::hypot(dx, angle_gap(std::arg(z), std::arg(w)));
}

const char* to_string(TailModel t) {
  switch (t) {
    case TailModel::ExactSeries: return "exact-series";
    case TailModel::StripEnvelope: return "strip-envelope";
    case TailModel::FittedDecay: return "fitted-decay";
  }
  return "?";
}

const char* to_string(DegenerationModel m) {
  return m == DegenerationModel::PowerLaw ? "power-law" : "log-over-power";
}

namespace {

// The region is {phi >= 0}, phi = min over terms. Each term carries its own
// bound on |d term / d arg z| so that a cell can be decided by one term.
struct Indicator {
  const EntireMap& f;
  const Exclusion& D;
  double log_rho;

  // verdict: -1 whole cell outside, +1 whole cell inside, 0 undecided
  void operator()(double r, double v, double half, double& phi, int& verdict) const {
    cplx z = std::polar(r, v);
    Scaled s = f.eval_scaled(z);
    double la = s.log_abs();
    double g = std::abs(z * f.log_derivative(z));
    bool all_in = true, some_out = false;
    auto take = [&](double t, double lip) {
      double reach = kSafety * lip * half;
      if (t < 0.0 && -t > reach) some_out = true;
      if (!(t > reach)) all_in = false;
      phi = std::min(phi, t);
    };
    phi = std::numeric_limits<double>::infinity();
    take(log_rho - la, g);
    for (const auto& d : D) {
      // log|f - c| - log r_d, computed without forming f when the two scales differ
      double lc = std::log(std::abs(d.center)), lr = std::log(d.radius);
      if (d.center == cplx{} || la > lc + 36.0) {
        take(la - lr, g);
      } else if (la < lc - 36.0) {
        take(lc - lr, g * std::exp(la - lc));
      } else {
        cplx fv = s.value();
        double dd = std::abs(fv - d.center);
        // f rounded onto an excluded center: deep inside D
        if (dd == 0.0) {
          phi = -std::numeric_limits<double>::infinity();
          some_out = true;
          all_in = false;
        } else {
          take(std::log(dd) - lr, g * std::abs(fv) / dd);
        }
      }
    }
    verdict = some_out ? -1 : (all_in ? 1 : 0);
  }

  static constexpr double kSafety = 2.0;
};

constexpr int kInitialCells = 64;
constexpr double kInsideArc = 0.5;
constexpr double kLeafArc = 1e-7;

AngularMeasure measure_circle(const Indicator& ind, double u) {
  double r = std::exp(u);
  AngularMeasure out;
  struct Cell {
    double a, b;
  };
  std::vector<Cell> stack;
  stack.reserve(256);
  for (int c = kInitialCells - 1; c >= 0; --c)
    stack.push_back({kTwoPi * c / kInitialCells, kTwoPi * (c + 1) / kInitialCells});
  while (!stack.empty()) {
    Cell cell = stack.back();
    stack.pop_back();
    double w = cell.b - cell.a, m = 0.5 * (cell.a + cell.b);
    double phi;
    int verdict;
    ind(r, m, 0.5 * w, phi, verdict);
    ++out.evaluations;
    double arc = r * w;
    if (verdict < 0) continue;
    if (verdict > 0 && arc <= kInsideArc) {
      out.measure += w;
      continue;
    }
    if (verdict == 0 && (arc <= kLeafArc || w <= 1e-14)) {
      if (phi >= 0.0) out.measure += w;
      out.undecided += w;
      continue;
    }
    stack.push_back({m, cell.b});
    stack.push_back({cell.a, m});
  }
  return out;
}

// integral_0^x arcsin(t)/t dt for 0 <= |x| <= 1
double arcsin_over_t(double x) {
  double s = 0.0, c = 1.0, x2 = x * x, p = x;
  for (int n = 0; n < 400; ++n) {
    double term = c * p / ((2.0 * n + 1.0) * (2.0 * n + 1.0));
    s += term;
    if (std::fabs(term) < 1e-18 * std::fabs(s)) break;
    c *= (2.0 * n + 1.0) / (2.0 * n + 2.0);
    p *= x2;
  }
  return s;
}

// integral over log r > W of the angular measure of {lo <= Re z <= hi} on |z| = r
double strip_tail(double lo, double hi, double W) {
  double R = std::exp(W);
  double a = std::clamp(hi / R, -1.0, 1.0), b = std::clamp(lo / R, -1.0, 1.0);
  return 2.0 * (arcsin_over_t(a) - arcsin_over_t(b));
}

struct StratumResult {
  double integral = 0.0;
  double variance = 0.0;
  double resolution = 0.0;
  double lo = 0.0, hi = 0.0;
  long long samples = 0;
  long long evaluations = 0;
};

double uniform01(std::uint64_t& state) {
  state = mix_seed(state, 0);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

StratumResult run_stratum(const Indicator& ind, double lo, double hi, std::uint64_t stream_seed,
                          long long allowance) {
  StratumResult res;
  res.lo = lo;
  res.hi = hi;
  AngularMeasure pilot = measure_circle(ind, 0.5 * (lo + hi));
  res.evaluations += pilot.evaluations;
  long long per = std::max<long long>(1, pilot.evaluations);
  long long m = 1;
  while (m * 2 * 2 * per <= allowance && m < 4096) m *= 2;
  double width = (hi - lo) / static_cast<double>(m);
  // Within a sub-stratum u is drawn with density proportional to e^{-u}; the
  // weighted integrand m(u) e^{u} is nearly flat for every family here.
  double mass_factor = -std::expm1(-width);
  std::uint64_t state = stream_seed;
  for (long long j = 0; j < m; ++j) {
    double a = lo + width * static_cast<double>(j);
    double z = std::exp(-a) * mass_factor;
    double y[2];
    for (double& yk : y) {
      double u = a - std::log1p(-uniform01(state) * mass_factor);
      AngularMeasure am = measure_circle(ind, u);
      res.evaluations += am.evaluations;
      yk = am.measure * std::exp(u) * z;
      res.resolution += 0.5 * am.undecided * std::exp(u) * z;
    }
    res.integral += 0.5 * (y[0] + y[1]);
    double d = y[0] - y[1];
    res.variance += d * d / 4.0;
    res.samples += 2;
  }
  return res;
}

void validate(const EntireMap& f, const Exclusion& D, double rho, double alpha, long long budget) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::DomainError, "alpha must be positive", {}, alpha);
  if (budget <= 0) fail(ErrorKind::DomainError, "budget must be positive", {}, static_cast<double>(budget));
  double sup = 1.0;
  for (const auto& d : D) {
    if (!(d.radius > 0.0)) fail(ErrorKind::DomainError, "exclusion disk with nonpositive radius", d.center, d.radius);
    sup = std::max(sup, std::abs(d.center) + d.radius);
  }
  if (!(rho > sup) || !std::isfinite(rho))
    fail(ErrorKind::DomainError, "rho must exceed max(1, sup |D|)", {}, rho);
  for (cplx s : singular_values(f)) {
    bool covered = false;
    for (const auto& d : D) covered |= std::abs(s - d.center) < d.radius;
    if (!covered) fail(ErrorKind::DomainError, "exclusion region misses a singular value", s);
  }
}

struct TailSetup {
  TailModel model = TailModel::FittedDecay;
  double lo = 0.0, hi = 0.0;  // strip in Re z for the series models
};

TailSetup tail_setup(const EntireMap& f, const Exclusion& D, double rho) {
  TailSetup t;
  if (const auto* e = std::get_if<Exponential>(&f.family())) {
    double la = std::log(std::abs(e->a));
    t.hi = std::log(rho) - la;
    if (D.size() == 1 && std::abs(D[0].center) == 0.0) {
      t.model = TailModel::ExactSeries;
      t.lo = std::log(D[0].radius) - la;
    } else {
      double delta = 0.0;
      for (const auto& d : D) delta = std::max(delta, d.radius - std::abs(d.center));
      t.model = TailModel::StripEnvelope;
      t.lo = std::log(delta) - la;
    }
  } else if (const auto* c = std::get_if<Cosine>(&f.family())) {
    double A = std::abs(c->a), B = std::abs(c->b);
    double s = rho + std::sqrt(rho * rho + 4.0 * A * B);
    t.model = TailModel::StripEnvelope;
    t.hi = std::log(s / (2.0 * A));
    t.lo = -std::log(s / (2.0 * B));
  }
  return t;
}

double fitted_tail(const std::vector<StratumResult>& done, double W) {
  if (done.empty()) return 0.0;
  const auto& s2 = done.back();
  double u2 = 0.5 * (s2.lo + s2.hi), y2 = s2.integral / (s2.hi - s2.lo);
  double a = y2 * std::exp(u2), b = 0.0;
  if (done.size() >= 2) {
    const auto& s1 = done[done.size() - 2];
    double u1 = 0.5 * (s1.lo + s1.hi), y1 = s1.integral / (s1.hi - s1.lo);
    double g1 = y1 * std::exp(u1), g2 = y2 * std::exp(u2);
    b = (g2 - g1) / (u2 - u1);
    a = g2 - b * u2;
  }
  // integral_W^inf (a + b u) e^{-u} du
  double t = (a + b * (W + 1.0)) * std::exp(-W);
  return std::max(t, 0.0);
}

AreaEstimate run_aap(const EntireMap& f, const Exclusion& D, double rho, double alpha, std::uint64_t seed,
                     long long budget, const AapOptions& opt) {
  validate(f, D, rho, alpha, budget);
  Indicator ind{f, D, std::log(rho)};
  TailSetup ts = tail_setup(f, D, rho);
  const double w = opt.stratum_width;
  const double u0 = std::log(alpha * rho);
  const long long k0 = static_cast<long long>(std::floor(u0 / w));
  const long long allowance = std::max<long long>(1, budget / 16);
  const long long max_strata = std::max<long long>(1, budget / allowance);

  AreaEstimate est;
  est.seed = seed;
  est.tail_model = ts.model;
  std::vector<StratumResult> done;
  double value = 0.0, var = 0.0, tail = 0.0, W = u0;
  for (long long first = 0; first < max_strata; first += opt.batch) {
    long long n = std::min<long long>(opt.batch, max_strata - first);
    std::vector<StratumResult> batch(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1) if (opt.parallel)
    for (long long i = 0; i < n; ++i) {
      long long k = k0 + first + i;
      double lo = std::max(u0, w * static_cast<double>(k));
      double hi = w * static_cast<double>(k + 1);
      batch[static_cast<std::size_t>(i)] =
          run_stratum(ind, lo, hi, mix_seed(seed, static_cast<std::uint64_t>(k)), allowance);
    }
    for (const auto& s : batch) {
      value += s.integral;
      var += s.variance;
      est.resolution_bound += s.resolution;
      est.n_samples += s.samples;
      est.evaluations += s.evaluations;
      done.push_back(s);
    }
    W = done.back().hi;
    if (ts.model == TailModel::FittedDecay)
      tail = fitted_tail(done, W);
    else
      tail = strip_tail(ts.lo, ts.hi, W);
    if (value > 0.0 && tail <= opt.tail_fraction * value) break;
  }
  est.w_max = W;
  est.tail_bound = std::max(tail, 0.0);
  est.std_error = std::sqrt(var);
  if (ts.model == TailModel::ExactSeries) {
    value += est.tail_bound;
    est.tail_added = true;
  }
  est.value = value;
  if (value > 0.0) {
    est.convergence_warning = est.std_error >= 0.05 * value ||
                              (!est.tail_added && est.tail_bound > opt.tail_fraction * value);
  }
  return est;
}

}  // namespace

AngularMeasure angular_measure(const EntireMap& f, const Exclusion& D, double rho, double u) {
  Indicator ind{f, D, std::log(rho)};
  return measure_circle(ind, u);
}

AreaEstimate aap_integral(const EntireMap& f, const Exclusion& D, double rho, double alpha, std::uint64_t seed,
                          long long budget, const AapOptions& opt) {
  return run_aap(f, D, rho, alpha, seed, budget, opt);
}

AreaEstimate aap_integral_reference(const EntireMap& f, const Exclusion& D, double rho, double alpha,
                                    std::uint64_t seed, long long budget) {
  AapOptions opt;
  opt.parallel = false;
  return run_aap(f, D, rho, alpha, seed, budget, opt);
}

DegenerationFit fit_degeneration(const std::vector<std::pair<double, AreaEstimate>>& samples) {
  std::vector<double> xs, ys, ws;
  DegenerationFit fit;
  for (const auto& [rho, e] : samples) {
    if (!(e.value > 0.0) || !(rho > 1.0)) continue;
    double sy = std::max(e.std_error / e.value, 1e-6);
    xs.push_back(std::log(rho));
    ys.push_back(std::log(e.value));
    ws.push_back(1.0 / (sy * sy));
    fit.samples.emplace_back(rho, e.value);
  }
  if (xs.size() < 4) fail(ErrorKind::InsufficientData, "fewer than 4 nonzero samples", {}, static_cast<double>(xs.size()));
  auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if ((*mx - *mn) / std::log(10.0) < 2.0)
    fail(ErrorKind::InsufficientData, "samples span less than 2 decades", {}, (*mx - *mn) / std::log(10.0));

  double sw = 0, sy_w = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    sw += ws[i];
    sy_w += ws[i] * ys[i];
  }
  double ybar = sy_w / sw, sst = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) sst += ws[i] * (ys[i] - ybar) * (ys[i] - ybar);

  auto solve = [&](bool log_over_power, double& slope, double& icpt) {
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double y = ys[i] - (log_over_power ? std::log(xs[i]) : 0.0);
      s0 += ws[i];
      s1 += ws[i] * xs[i];
      s2 += ws[i] * xs[i] * xs[i];
      t0 += ws[i] * y;
      t1 += ws[i] * xs[i] * y;
    }
    double det = s0 * s2 - s1 * s1;
    slope = (s0 * t1 - s1 * t0) / det;
    icpt = (t0 - slope * s1) / s0;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double pred = icpt + slope * xs[i] + (log_over_power ? std::log(xs[i]) : 0.0);
      ssr += ws[i] * (ys[i] - pred) * (ys[i] - pred);
    }
    double r2 = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-24 * sw ? 1.0 : 0.0);
    return std::clamp(r2, 0.0, 1.0);
  };
  double k1, c1, k2, c2;
  double r_pow = solve(false, k1, c1);
  double r_log = solve(true, k2, c2);
  if (r_log > r_pow) {
    fit.model = DegenerationModel::LogOverPower;
    fit.exponent = k2;
    fit.intercept = c2;
    fit.r2 = r_log;
  } else {
    fit.model = DegenerationModel::PowerLaw;
    fit.exponent = k1;
    fit.intercept = c1;
    fit.r2 = r_pow;
  }
  return fit;
}

SparseVerdict log_sparse_check(const std::vector<cplx>& points, double delta) {
  SparseVerdict v;
  v.distance = std::numeric_limits<double>::infinity();
  for (cplx p : points)
    if (p == cplx{}) fail(ErrorKind::DomainError, "log_sparse_check needs nonzero points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) continue;
      double d = cyl_dist(points[i], points[j]);
      if (d < v.distance) {
        v.distance = d;
        v.i = i;
        v.j = j;
      }
    }
  }
  v.sparse = v.distance >= delta;
  return v;
}

ScalingReport scaling_lemma_check(const EntireMap& f, const Exclusion& D, const std::vector<double>& rhos,
                                  double alpha, std::uint64_t seed, long long budget) {
  ScalingReport rep;
  for (double rho : rhos) {
    ScalingRow row;
    row.rho = rho;
    row.lhs = aap_integral(f, D, rho, alpha, seed, budget);
    row.first = aap_integral(f, D, alpha * rho, 1.0, seed, budget);
    row.second = aap_integral(f, D, alpha * alpha * rho, 1.0, seed, budget);
    auto err = [](const AreaEstimate& e) { return e.std_error + (e.tail_added ? 0.0 : e.tail_bound); };
    row.margin = row.first.value + 2.0 * row.second.value - row.lhs.value;
    row.sigma = std::sqrt(std::pow(err(row.lhs), 2) + std::pow(err(row.first), 2) + 4.0 * std::pow(err(row.second), 2));
    row.holds = row.margin > -3.0 * row.sigma;
    rep.rows.push_back(row);
  }
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    if (!rep.rows[i].holds) break;
    rep.threshold = rep.rows[i].rho;
  }
  return rep;
}

}  // namespace thk
