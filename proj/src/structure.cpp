#include "thk/structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thk/spider.hpp"

namespace thk {

// ---------------------------------------------------------------------------
// escape speed

EscapeReport classify_escape(const Polyline& orbit, double k) {
  const int n = static_cast<int>(orbit.size());
  if (n < 3) fail(ErrorKind::DomainError, "classify_escape needs at least three orbit points", {}, n);
  if (!(k > 0.0)) fail(ErrorKind::DomainError, "k must be positive", {}, k);
  EscapeReport r;
  r.k = k;
  const double e = std::exp(1.0);
  for (int j = 0; j < n; ++j) {
    double m = std::abs(orbit[j]);
    if (m == 0.0) r.log_excluded.push_back(j);
    if (m <= e * (1.0 + 1e-12)) r.loglog_excluded.push_back(j);
  }
  auto excluded = [](const std::vector<int>& v, int j) { return std::find(v.begin(), v.end(), j) != v.end(); };

  // exp-fast: from the first defined pair on, every defined pair satisfies the bound
  int last_fail = -1, first_valid = -1;
  for (int j = 0; j + 1 < n; ++j) {
    if (excluded(r.log_excluded, j) || excluded(r.log_excluded, j + 1)) continue;
    double lhs = std::log(std::abs(orbit[j + 1])), rhs = k * std::abs(orbit[j]);
    bool ok = lhs >= rhs * (1.0 - 1e-12) - 1e-12;
    if (!ok) last_fail = j;
    if (first_valid < 0 && ok) first_valid = j;
  }
  if (first_valid >= 0) {
    int n0 = first_valid;
    if (last_fail >= n0) {
      n0 = -1;
      for (int j = last_fail + 1; j + 1 < n; ++j)
        if (!excluded(r.log_excluded, j) && !excluded(r.log_excluded, j + 1)) {
          n0 = j;
          break;
        }
    }
    r.n0 = n0;
    r.exp_fast = n0 >= 0;
  }

  std::vector<double> defined;
  for (int j = 0; j + 1 < n; ++j) {
    double v = std::numeric_limits<double>::quiet_NaN();
    if (!excluded(r.loglog_excluded, j) && !excluded(r.loglog_excluded, j + 1)) {
      v = std::log(std::log(std::abs(orbit[j + 1]))) / std::log(std::log(std::abs(orbit[j])));
      defined.push_back(v);
    }
    r.loglog_ratio.push_back(v);
  }
  if (!defined.empty())
    r.loglog_inf_tail = *std::min_element(defined.begin() + static_cast<std::ptrdiff_t>(defined.size() / 2), defined.end());

  int from = n - 1;
  while (from > 0 && std::abs(orbit[from - 1]) < std::abs(orbit[from])) --from;
  if (from <= n - 2) {
    r.monotone_from = from;
    r.eventually_monotone = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// separating structure

std::vector<cplx> captured_singular_values(const EntireMap& f) {
  std::vector<cplx> sv = singular_values(f);
  if (!f.capture()) return sv;
  const auto& c = *f.capture();
  std::vector<cplx> out;
  for (cplx v : sv)
    if (std::abs(v) >= c.support_radius) out.push_back(v);
  for (const auto& ov : c.overrides)
    if (ov.index == 0) out.push_back(ov.position);
  return out;
}

const char* to_string(K1Source s) { return s == K1Source::Constructive ? "constructive" : "bound"; }

bool SeparatingStructureReport::holds() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const ClauseVerdict& v) { return v.holds; });
}

const ClauseVerdict& SeparatingStructureReport::clause(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.clause == name) return v;
  fail(ErrorKind::NotFound, "no clause " + name);
}

namespace {

bool same_point(cplx a, cplx b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

std::string label_ij(std::size_t i, std::size_t j) {
  return "a[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

bool in_exclusion(const Exclusion& U, cplx z) {
  return std::any_of(U.begin(), U.end(), [&](const Disk& d) { return std::abs(z - d.center) < d.radius; });
}

struct RegularityScan {
  double K1 = 1.0;
  int shifts = 0;
  bool ok = true;
  std::string witness;
};

// Constructive clause 3: shifts of sampled tract boundary points and of the
// marked points inside the tracts, with delta = eps/2 and tracts at rho/2, rho.
RegularityScan scan_regularity(const EntireMap& f, const Polyline& X, double rho, double eps,
                               const StructureOptions& opt, double d) {
  RegularityScan out;
  RegularityOptions ro{0.5 * eps, opt.C_reg, d};
  const double lr = std::log(rho);
  auto run = [&](cplx x) {
    RegularityShift sh = regularity_shift(f, rho, X, x, ro);
    out.K1 = std::max(out.K1, sh.K);
    ++out.shifts;
  };
  try {
    for (int c = 0; c < f.tract_count(); ++c) {
      Tract t = tract_boundary(f, rho, 0, 64, c);
      cplx b = t.base_point;
      if (!(std::abs(b) < rho)) continue;
      cplx F0 = f.log_eval(b);
      auto label = f.tract_label(b, 0.5 * rho);
      std::vector<double> heights;
      int n = std::max(2, opt.boundary_samples);
      for (int k = 0; k < n; ++k) heights.push_back(F0.imag() - 2.0 * kPi + 4.0 * kPi * k / (n - 1));
      // boundary points whose corridors run close to a marked point
      for (cplx x : X) {
        if (!(std::abs(x) < rho * std::exp(ro.eps)) || f.tract_label(x, 0.5 * rho) != label) continue;
        double y = f.log_eval(x).imag();
        y += kTwoPi * std::round((F0.imag() - y) / kTwoPi);
        for (double s : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) heights.push_back(y + s * ro.eps);
      }
      for (double h : heights) {
        Polyline zeta{F0, cplx(lr, h)};
        cplx z = lift_log_path(f, zeta, b).z.back();
        if (!(std::abs(z) < rho)) continue;
        run(z);
      }
    }
    for (cplx x : X)
      if (std::abs(x) < rho && f.log_abs(x) > lr) run(x);
  } catch (const Error& e) {
    out.ok = false;
    out.K1 = std::numeric_limits<double>::infinity();
    out.witness = e.what();
  }
  return out;
}

}  // namespace

SeparatingStructureReport check_separating_structure(const EntireMap& f, const OrbitSpec& o, const StructureParams& p,
                                                     const Exclusion& U, const StructureOptions& opt) {
  if (!(p.rho > 0.0)) fail(ErrorKind::DomainError, "rho must be positive", {}, p.rho);
  if (!(p.q > 0.0 && p.q < 0.5)) fail(ErrorKind::DomainError, "q must lie in (0, 1/2)", {}, p.q);
  if (!(p.eps > 0.0 && p.eps < 1.0)) fail(ErrorKind::DomainError, "eps must lie in (0, 1)", {}, p.eps);

  SeparatingStructureReport r;
  r.params = p;
  r.params.K0 = f.K0();
  const double rho = p.rho, inner = p.q * p.rho, outer = p.rho * std::exp(p.eps);
  r.N_rho = count_inside(o, rho);
  bool any_points = false;
  for (const auto& orb : o.orbits) any_points = any_points || !orb.empty();

  // 1: capture supported in the inner disk
  {
    ClauseVerdict v{"1", true, "no capture"};
    if (f.capture()) {
      v.holds = f.capture()->support_radius <= inner;
      std::ostringstream s;
      s << "capture support radius " << f.capture()->support_radius << (v.holds ? " <= " : " > ") << "q rho = " << inner;
      v.witness = s.str();
    }
    r.verdicts.push_back(v);
  }

  std::vector<cplx> sv = captured_singular_values(f);
  auto find_in_orbits = [&](cplx z, std::size_t* oi, std::size_t* oj) {
    for (std::size_t i = 0; i < o.size(); ++i)
      for (std::size_t j = 0; j < o.orbits[i].size(); ++j)
        if (same_point(o.orbits[i][j], z)) {
          *oi = i;
          *oj = j;
          return true;
        }
    return false;
  };

  // 2a: singular values are marked and lie in the inner disk
  {
    ClauseVerdict v{"2a", true, any_points ? "" : "no marked orbits"};
    if (any_points)
      for (cplx s : sv) {
        std::size_t i, j;
        if (!find_in_orbits(s, &i, &j)) {
          v = {"2a", false, "singular value " + fmt_cplx(s) + " is not marked"};
          break;
        }
        if (!(std::abs(s) < inner)) {
          v = {"2a", false, "singular value " + fmt_cplx(s) + " lies outside the inner disk"};
          break;
        }
      }
    r.verdicts.push_back(v);
  }

  // 2b: the marked points in U are exactly the singular values
  {
    ClauseVerdict v{"2b", true, any_points ? "" : "no marked orbits"};
    if (any_points) {
      for (cplx s : sv)
        if (!in_exclusion(U, s)) {
          v = {"2b", false, "singular value " + fmt_cplx(s) + " outside U"};
          break;
        }
      for (std::size_t i = 0; i < o.size() && v.holds; ++i)
        for (std::size_t j = 0; j < o.orbits[i].size() && v.holds; ++j) {
          cplx z = o.orbits[i][j];
          if (!in_exclusion(U, z)) continue;
          bool singular = std::any_of(sv.begin(), sv.end(), [&](cplx s) { return same_point(s, z); });
          if (!singular) v = {"2b", false, label_ij(i, j) + " = " + fmt_cplx(z) + " lies in U but is not singular"};
        }
    }
    r.verdicts.push_back(v);
  }

  // 2c: no marked point in the annulus q rho < |z| < rho e^eps
  {
    ClauseVerdict v{"2c", true, ""};
    for (std::size_t i = 0; i < o.size() && v.holds; ++i)
      for (std::size_t j = 0; j < o.orbits[i].size() && v.holds; ++j) {
        double m = std::abs(o.orbits[i][j]);
        if (m > inner && m < outer) v = {"2c", false, label_ij(i, j) + " = " + fmt_cplx(o.orbits[i][j])};
      }
    r.verdicts.push_back(v);
  }

  // 2d: marked points outside the disk map outside the disk
  {
    ClauseVerdict v{"2d", true, ""};
    for (std::size_t i = 0; i < o.size() && v.holds; ++i) {
      bool left = false;
      for (std::size_t j = 0; j < o.orbits[i].size() && v.holds; ++j) {
        bool in = std::abs(o.orbits[i][j]) < rho;
        if (left && in) v = {"2d", false, label_ij(i, j) + " re-enters the disk"};
        left = left || !in;
      }
    }
    r.verdicts.push_back(v);
  }

  // 2e: N(rho) finite. An orbit that never leaves the disk within its
  // computed points may cycle there.
  {
    ClauseVerdict v{"2e", true, "N(rho) = " + std::to_string(r.N_rho)};
    for (std::size_t i = 0; i < o.size() && v.holds; ++i) {
      bool truncated = i < o.truncated_at.size() && o.truncated_at[i] >= 0;
      if (!o.orbits[i].empty() && count_inside(o, i, rho) == static_cast<int>(o.orbits[i].size()) && !truncated)
        v = {"2e", false, "orbit " + std::to_string(i) + " never leaves the disk"};
    }
    r.verdicts.push_back(v);
  }

  // 3: regularity, measured
  {
    Polyline X;
    for (const auto& orb : o.orbits)
      for (cplx z : orb)
        if (std::abs(z) < outer) X.push_back(z);
    double d = growth_exponent(f).d;
    RegularityScan scan = scan_regularity(f, X, rho, p.eps, opt, d);
    r.params.K1 = scan.K1;
    r.regularity_shifts = scan.shifts;
    r.K1_bound = opt.C_reg * std::pow(std::log(rho), 2.0 * d * (static_cast<double>(X.size()) + 1.0));
    std::ostringstream s;
    if (scan.ok)
      s << "measured K1 = " << scan.K1 << " over " << scan.shifts << " shifts";
    else
      s << scan.witness;
    r.verdicts.push_back({"3", scan.ok, s.str()});
  }

  // 4: last inside points sharing a tract have separated images
  {
    ClauseVerdict v{"4", true, ""};
    for (std::size_t i = 0; i < o.size() && v.holds; ++i)
      for (std::size_t k = i + 1; k < o.size() && v.holds; ++k) {
        int ni = count_inside(o, i, rho), nk = count_inside(o, k, rho);
        if (ni == 0 || nk == 0) continue;
        cplx ai = o.orbits[i][static_cast<std::size_t>(ni - 1)], ak = o.orbits[k][static_cast<std::size_t>(nk - 1)];
        auto ti = f.tract_label(ai, rho), tk = f.tract_label(ak, rho);
        if (!ti || !tk || *ti != *tk) continue;
        if (static_cast<std::size_t>(ni) >= o.orbits[i].size() || static_cast<std::size_t>(nk) >= o.orbits[k].size())
          continue;  // images beyond the overflow horizon
        double dc = cyl_dist(o.orbits[i][static_cast<std::size_t>(ni)], o.orbits[k][static_cast<std::size_t>(nk)]);
        if (!(dc > p.eps)) {
          std::ostringstream s;
          s << label_ij(i, static_cast<std::size_t>(ni)) << " and " << label_ij(k, static_cast<std::size_t>(nk))
            << " at cylindrical distance " << dc;
          v = {"4", false, s.str()};
        }
      }
    r.verdicts.push_back(v);
  }

  double best = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < o.orbits[i].size(); ++j) s += std::log(static_cast<double>(o.omega(i, j)));
    best = std::max(best, s);
  }
  r.ln_max_omega_product = best;
  r.omega_truncation_exact = f.critical_values().empty();
  return r;
}

InvariantMargin invariant_inequality(int N, double K0, double K1, double ln_max_omega_product, double I_q, double delta,
                                     double nu) {
  if (N < 0) fail(ErrorKind::DomainError, "N must be non-negative", {}, N);
  if (!(delta > 0.0)) fail(ErrorKind::DomainError, "Delta must be positive", {}, delta);
  if (!(nu > 1.0)) fail(ErrorKind::DomainError, "nu must exceed 1", {}, nu);
  if (!(K0 >= 1.0) || !(K1 >= 1.0)) fail(ErrorKind::DomainError, "K0 and K1 must be at least 1");
  if (!(ln_max_omega_product >= 0.0)) fail(ErrorKind::DomainError, "omega product must be at least 1");
  if (!(I_q >= 0.0)) fail(ErrorKind::DomainError, "area must be non-negative", {}, I_q);
  InvariantMargin m;
  if (I_q == 0.0) {
    m.exact_zero_area = true;
    m.margin = std::numeric_limits<double>::infinity();
    return m;
  }
  m.ln_area = std::log(I_q);
  double L = std::log(K1) + std::log(K0) + ln_max_omega_product;
  if (!std::isfinite(L)) {
    m.ln_dilatation_term = L;
    m.margin = -std::numeric_limits<double>::infinity();
    return m;
  }
  if (L > 0.0) {
    m.ln_dilatation_term = std::exp(N * std::log(nu)) * L;
    if (!std::isfinite(m.ln_dilatation_term)) {
      m.overflow = true;
      m.margin = -std::numeric_limits<double>::infinity();
      return m;
    }
  }
  m.margin = std::log(delta) - (m.ln_area + m.ln_dilatation_term);
  return m;
}

InvariantMargin invariant_inequality(const SeparatingStructureReport& r, const AreaEstimate& I_q, double delta,
                                     double nu) {
  if (std::isinf(r.params.K1)) {
    InvariantMargin m;
    m.ln_area = I_q.value > 0.0 ? std::log(I_q.value) : -std::numeric_limits<double>::infinity();
    m.ln_dilatation_term = std::numeric_limits<double>::infinity();
    m.margin = -std::numeric_limits<double>::infinity();
    return m;
  }
  return invariant_inequality(r.N_rho, r.params.K0, r.params.K1, r.ln_max_omega_product, I_q.value, delta, nu);
}

// ---------------------------------------------------------------------------
// fixed point hypotheses

FixedPointVerdict fixed_point_conditions(const OrbitSpec& o, double rho, double eps) {
  if (!(rho > 0.0)) fail(ErrorKind::DomainError, "rho must be positive", {}, rho);
  struct P {
    cplx z;
    std::size_t i, j;
  };
  std::vector<P> pts;
  for (std::size_t i = 0; i < o.size(); ++i)
    for (std::size_t j = 0; j < o.orbits[i].size(); ++j)
      if (std::abs(o.orbits[i][j]) > rho) pts.push_back({o.orbits[i][j], i, j});
  FixedPointVerdict v;
  for (std::size_t a = 0; a < pts.size() && v.separated; ++a)
    for (std::size_t b = a + 1; b < pts.size() && v.separated; ++b) {
      double d = cyl_dist(pts[a].z, pts[b].z);
      if (!(d > eps)) {
        std::ostringstream s;
        s << label_ij(pts[a].i, pts[a].j) << " and " << label_ij(pts[b].i, pts[b].j) << " at cylindrical distance " << d;
        v.separated = false;
        v.witness = s.str();
      }
    }
  std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) { return std::abs(a.z) < std::abs(b.z); });
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = k; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) best = std::min(best, cyl_dist(pts[a].z, pts[b].z));
    v.min_dist_by_r.push_back({std::abs(pts[k].z) * (1.0 - 1e-12), best});
  }
  for (std::size_t k = 1; k < v.min_dist_by_r.size(); ++k)
    if (!(v.min_dist_by_r[k].second > v.min_dist_by_r[k - 1].second)) v.distances_increasing = false;
  return v;
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

double log3(double rho) {
  double a = std::log(rho);
  if (!(a > 0.0)) return 0.0;
  double b = std::log(a);
  if (!(b > 0.0)) return 0.0;
  return std::log(b);
}

std::vector<SeparatingStructureReport> sweep_reports(const EntireMap& f, const OrbitSpec& o,
                                                     const std::vector<double>& grid, const SweepOptions& opt,
                                                     std::vector<RhoSweepRow>& rows) {
  std::vector<SeparatingStructureReport> reports;
  for (double rho : grid) {
    StructureParams p;
    p.rho = rho;
    p.q = opt.q;
    p.eps = opt.eps;
    SeparatingStructureReport rep = check_separating_structure(f, o, p, opt.U, opt.structure);
    AreaEstimate I = aap_integral(f, opt.D, rho, opt.q, opt.seed, opt.budget);
    RhoSweepRow row;
    row.rho = rho;
    row.N = rep.N_rho;
    row.structure_holds = rep.holds();
    for (const auto& v : rep.verdicts)
      if (!v.holds) row.failed_clauses += (row.failed_clauses.empty() ? "" : ",") + v.clause;
    row.K1 = rep.params.K1;
    row.I_q = I.value;
    row.I_q_error = I.std_error;
    row.margin = invariant_inequality(rep, I, opt.delta, opt.nu);
    rows.push_back(row);
    reports.push_back(std::move(rep));
  }
  double A = 0.0;
  for (const auto& row : rows)
    if (log3(row.rho) > 0.0) A = std::max(A, row.N / log3(row.rho));
  for (auto& row : rows) row.envelope = A * log3(row.rho);
  return reports;
}

}  // namespace

std::vector<RhoSweepRow> rho_sweep(const EntireMap& f, const OrbitSpec& o, const std::vector<double>& grid,
                                   const SweepOptions& opt) {
  std::vector<RhoSweepRow> rows;
  sweep_reports(f, o, grid, opt, rows);
  return rows;
}

AdmissibleRho find_admissible_rho(const EntireMap& f, const OrbitSpec& o, const std::vector<double>& grid,
                                  const SweepOptions& opt) {
  if (grid.empty()) fail(ErrorKind::DomainError, "empty rho grid");
  AdmissibleRho out;
  std::vector<SeparatingStructureReport> reports = sweep_reports(f, o, grid, opt, out.sweep);
  for (const auto& row : out.sweep)
    if (log3(row.rho) > 0.0) out.A_fit = std::max(out.A_fit, row.N / log3(row.rho));
  double best = -std::numeric_limits<double>::infinity(), best_rho = grid.front();
  for (std::size_t k = 0; k < out.sweep.size(); ++k) {
    const auto& row = out.sweep[k];
    if (row.structure_holds && row.margin.margin > 0.0) {
      out.rho = row.rho;
      out.report = reports[k];
      out.margin = row.margin;
      return out;
    }
    if (row.structure_holds && row.margin.margin > best) best = row.margin.margin, best_rho = row.rho;
  }
  std::ostringstream s;
  s << "no admissible rho on the grid;";
  if (std::isfinite(best))
    s << " best margin " << best << " at rho " << best_rho;
  else
    s << " the structure fails everywhere (clauses " << out.sweep.front().failed_clauses << " at the first radius)";
  fail(ErrorKind::NotFound, s.str(), {}, best);
}

}  // namespace thk
