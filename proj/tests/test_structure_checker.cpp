#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "thk/structure.hpp"

using namespace thk;

namespace {

const double kE = std::exp(1.0);

// integral_{lo}^{inf} 2 arcsin(L / r) dr / r by Simpson in t = L / r
double exp_strip_oracle(double L, double r_lo) {
  double T = L / r_lo;
  int n = 20000;
  double h = T / n, s = 0.0;
  for (int k = 0; k <= n; ++k) {
    double t = k * h;
    double g = k == 0 ? 1.0 : std::asin(t) / t;
    s += g * ((k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  return 2.0 * s * h / 3.0;
}

StructureParams params(double rho, double q = 0.1, double eps = 0.5) {
  StructureParams p;
  p.rho = rho;
  p.q = q;
  p.eps = eps;
  return p;
}

const Exclusion kU{{cplx(0.0), 0.75}};

OrbitSpec exp_orbit_of_zero() { return OrbitSpec::forward(EntireMap::exponential(), {cplx(0.0)}, 8); }

std::vector<double> exp_grid(double from, double to) {
  std::vector<double> g;
  for (double L = from; L <= to + 1e-9; L += 1.0) g.push_back(std::exp(L));
  return g;
}

}  // namespace

TEST_CASE("forward orbits") {
  auto e = EntireMap::exponential();
  auto o = forward_orbit(e, 0.0, 3);
  REQUIRE(o.size() == 4);
  CHECK(o[0] == cplx(0.0));
  CHECK(std::abs(o[1] - 1.0) < 1e-15);
  CHECK(std::abs(o[2] - kE) < 1e-15);
  CHECK(std::abs(o[3] - std::exp(kE)) < 1e-12);

  auto c = forward_orbit(EntireMap::cosine(0.5, 0.5), 0.0, 2);
  REQUIRE(c.size() == 3);
  CHECK(std::abs(c[1] - 1.0) < 1e-15);
  CHECK(std::abs(c[2] - std::cosh(1.0)) < 1e-12);

  int cut = -1;
  auto far = forward_orbit(e, 1000.0, 3, &cut);
  CHECK(far.size() == 1);
  CHECK(cut == 1);

  OrbitSpec orb = exp_orbit_of_zero();
  REQUIRE(orb.orbits[0].size() == 5);
  CHECK(orb.truncated_at[0] == 5);
  for (std::size_t j = 0; j + 1 < orb.orbits[0].size(); ++j)
    CHECK(std::abs(orb.orbits[0][j + 1] - std::exp(orb.orbits[0][j])) <= 1e-9 * std::abs(orb.orbits[0][j + 1]));
  for (int w : orb.omegas[0]) CHECK(w == 1);
}

TEST_CASE("forward orbits honour capture overrides") {
  CaptureData cap;
  cap.support_radius = 1.5;
  cap.overrides = {{0, 0, cplx(1.0)}};
  cap.K0 = 2.0;
  auto f = EntireMap::exponential().with_capture(cap);
  OrbitSpec o = OrbitSpec::forward(f, {cplx(0.0)}, 3);
  CHECK(o.orbits[0][0] == cplx(1.0));
  CHECK(std::abs(o.orbits[0][1] - kE) < 1e-15);
  auto sv = captured_singular_values(f);
  REQUIRE(sv.size() == 1);
  CHECK(sv[0] == cplx(1.0));
}

TEST_CASE("escape classification") {
  Polyline tower{0.0, 1.0, kE, std::exp(kE), std::exp(std::exp(kE))};
  EscapeReport t = classify_escape(tower, 1.0);
  CHECK(t.exp_fast);
  CHECK(t.n0 == 1);
  CHECK(t.log_excluded == std::vector<int>{0});
  CHECK(t.loglog_excluded == std::vector<int>{0, 1, 2});
  CHECK(t.eventually_monotone);
  CHECK(t.monotone_from == 0);
  // log log of the tower is the tower shifted by two
  CHECK(t.loglog_ratio[3] == doctest::Approx(kE));

  Polyline linear;
  for (int j = 1; j <= 100; ++j) linear.push_back(static_cast<double>(j));
  for (double k : {0.1, 0.5, 1.0, 2.0}) CHECK_FALSE(classify_escape(linear, k).exp_fast);

  // log log e^{2^j} = j log 2, so the ratio is (j + 1) / j
  Polyline dbl;
  for (int j = 1; j <= 9; ++j) dbl.push_back(std::exp(std::pow(2.0, j)));
  EscapeReport d = classify_escape(dbl, 1.0);
  for (std::size_t j = 0; j < d.loglog_ratio.size(); ++j)
    CHECK(d.loglog_ratio[j] == doctest::Approx((j + 2.0) / (j + 1.0)).epsilon(1e-12));
  CHECK(d.loglog_inf_tail == doctest::Approx(9.0 / 8.0));
  CHECK(d.exp_fast == false);

  CHECK_THROWS_AS(classify_escape({1.0, 2.0}, 1.0), Error);
}

TEST_CASE("exponential orbit of 0 carries a separating structure") {
  auto f = EntireMap::exponential();
  OrbitSpec o = exp_orbit_of_zero();
  SeparatingStructureReport r = check_separating_structure(f, o, params(std::exp(10.0)), kU);
  for (const auto& v : r.verdicts) {
    CAPTURE(v.clause);
    CAPTURE(v.witness);
    CHECK(v.holds);
  }
  CHECK(r.N_rho == 4);
  CHECK(r.params.K0 == 1.0);
  CHECK(r.params.K1 == 1.0);
  CHECK(r.regularity_shifts > 30);
  CHECK(r.k1_source == K1Source::Constructive);
  CHECK(r.omega_truncation_exact);
}

TEST_CASE("structure clause failures carry witnesses") {
  auto f = EntireMap::exponential();
  double rho = std::exp(10.0);
  OrbitSpec o = exp_orbit_of_zero();
  o.orbits[0].insert(o.orbits[0].begin() + 4, cplx(5000.0));
  auto r = check_separating_structure(f, o, params(rho), kU);
  CHECK_FALSE(r.clause("2c").holds);
  CHECK(r.clause("2c").witness.find("a[0][4]") != std::string::npos);
  CHECK_FALSE(r.holds());

  // singular value missing from the marked set
  auto r1 = check_separating_structure(f, OrbitSpec::forward(f, {cplx(1.0)}, 6), params(rho), kU);
  CHECK_FALSE(r1.clause("2a").holds);

  // re-entering orbit
  OrbitSpec back = OrbitSpec::explicit_orbits({{cplx(0.0), cplx(1.0), cplx(1e9), cplx(2.0), cplx(1e12)}});
  CHECK_FALSE(check_separating_structure(f, back, params(rho), kU).clause("2d").holds);

  // an orbit trapped in the disk
  OrbitSpec stuck = OrbitSpec::explicit_orbits({{cplx(0.0), cplx(1.0), cplx(2.0)}});
  CHECK_FALSE(check_separating_structure(f, stuck, params(rho), kU).clause("2e").holds);

  // capture larger than the inner disk
  CaptureData cap;
  cap.support_radius = 0.2 * rho;
  auto fc = f.with_capture(cap);
  CHECK_FALSE(check_separating_structure(fc, o, params(rho), kU).clause("1").holds);
}

TEST_CASE("clause 4 separates images of last points in a shared tract") {
  auto f = EntireMap::exponential();
  double rho = std::exp(10.0);
  cplx x1(12.0, 0.0), x2(12.0, 0.1);
  OrbitSpec o = OrbitSpec::explicit_orbits({{x1, std::exp(x1)}, {x2, std::exp(x2)}});
  auto r = check_separating_structure(f, o, params(rho), kU);
  CHECK_FALSE(r.clause("4").holds);
  CHECK(r.clause("4").witness.find("a[0][1]") != std::string::npos);

  cplx x3(12.0, 2.0);
  OrbitSpec apart = OrbitSpec::explicit_orbits({{x1, std::exp(x1)}, {x3, std::exp(x3)}});
  CHECK(check_separating_structure(f, apart, params(rho), kU).clause("4").holds);
}

TEST_CASE("regularity hypothesis failure is a clause verdict") {
  auto f = EntireMap::exponential();
  double rho = std::exp(10.0);
  // a marked point of the tract too close to its boundary in log coordinates
  cplx x(10.1, 0.0);
  OrbitSpec o = OrbitSpec::explicit_orbits({{x, std::exp(x)}});
  auto r = check_separating_structure(f, o, params(rho), kU);
  CHECK_FALSE(r.clause("3").holds);
  CHECK(std::isinf(r.params.K1));
  AreaEstimate I;
  I.value = 1e-9;
  CHECK(invariant_inequality(r, I).margin == -std::numeric_limits<double>::infinity());
}

TEST_CASE("verdicts do not depend on orbit order") {
  auto f = EntireMap::exponential();
  double rho = std::exp(10.0);
  std::vector<Polyline> orbs{{cplx(12.0), std::exp(cplx(12.0))},
                             {cplx(12.0, 0.1), std::exp(cplx(12.0, 0.1))},
                             {cplx(3.0, 1.0), std::exp(cplx(3.0, 1.0))},
                             {cplx(0.0), cplx(1.0), cplx(kE), cplx(std::exp(kE)), std::exp(cplx(std::exp(kE)))}};
  auto base = check_separating_structure(f, OrbitSpec::explicit_orbits(orbs), params(rho), kU);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 6; ++t) {
    std::shuffle(orbs.begin(), orbs.end(), rng);
    auto r = check_separating_structure(f, OrbitSpec::explicit_orbits(orbs), params(rho), kU);
    REQUIRE(r.verdicts.size() == base.verdicts.size());
    for (std::size_t k = 0; k < r.verdicts.size(); ++k) CHECK(r.verdicts[k].holds == base.verdicts[k].holds);
    CHECK(r.N_rho == base.N_rho);
    CHECK(r.params.K1 == base.params.K1);
  }
}

TEST_CASE("invariant inequality arithmetic") {
  CHECK(invariant_inequality(3, 1.0, 1.0, 0.0, 0.0).margin == std::numeric_limits<double>::infinity());
  CHECK(invariant_inequality(3, 1.0, 1.0, 0.0, 0.0).exact_zero_area);
  CHECK(invariant_inequality(5, 1.0, 1.0, 0.0, 0.5e-3, 1e-3).margin == doctest::Approx(std::log(2.0)));
  auto big = invariant_inequality(300, 1.0, 2.0, 0.0, 1e-5);
  CHECK(big.overflow);
  CHECK(big.margin == -std::numeric_limits<double>::infinity());
  auto m = invariant_inequality(2, 1.5, 2.0, std::log(3.0), 1e-4, 1e-3, 40.0);
  CHECK(m.ln_dilatation_term == doctest::Approx(1600.0 * std::log(9.0)));
  CHECK_THROWS_AS(invariant_inequality(2, 0.5, 1.0, 0.0, 1e-4), Error);
}

TEST_CASE("margin is antitone in K0, K1, Omega and the area") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    int N = static_cast<int>(u(rng) * 4);
    double K0 = 1.0 + u(rng), K1 = 1.0 + u(rng), W = u(rng), I = 1e-6 + u(rng) * 1e-3;
    double m = invariant_inequality(N, K0, K1, W, I).margin;
    double s = 1.0 + u(rng);
    CHECK(invariant_inequality(N, K0 * s, K1, W, I).margin <= m);
    CHECK(invariant_inequality(N, K0, K1 * s, W, I).margin <= m);
    CHECK(invariant_inequality(N, K0, K1, W * s + 0.01, I).margin <= m);
    CHECK(invariant_inequality(N, K0, K1, W, I * s).margin <= m);
  }
}

TEST_CASE("fixed point hypotheses") {
  Polyline dbl;
  for (int j = 1; j <= 9; ++j) dbl.push_back(std::exp(std::pow(2.0, j)));
  auto v = fixed_point_conditions(OrbitSpec::explicit_orbits({dbl}), 1.0, 0.5);
  CHECK(v.separated);
  CHECK(v.distances_increasing);
  REQUIRE(v.min_dist_by_r.size() == 8);
  // neighbours e^{2^j} and e^{2^{j+1}} are 2^j apart
  for (std::size_t k = 0; k < v.min_dist_by_r.size(); ++k)
    CHECK(v.min_dist_by_r[k].second == doctest::Approx(std::pow(2.0, k + 1)));

  OrbitSpec shared = OrbitSpec::explicit_orbits({{cplx(2.0), cplx(100.0)}, {cplx(3.0), cplx(100.0)}});
  auto s = fixed_point_conditions(shared, 10.0, 0.5);
  CHECK_FALSE(s.separated);
  CHECK(s.witness.find("a[0][1]") != std::string::npos);

  auto one = fixed_point_conditions(OrbitSpec::explicit_orbits({{cplx(50.0)}}), 10.0, 0.5);
  CHECK(one.separated);
  CHECK(one.min_dist_by_r.empty());
}

TEST_CASE("sweep area matches the strip integral") {
  auto f = EntireMap::exponential();
  SweepOptions opt;
  opt.q = 0.4;
  opt.D = {{cplx(0.0), 1.0}};
  opt.budget = 100000;
  auto rows = rho_sweep(f, exp_orbit_of_zero(), exp_grid(8.0, 11.0), opt);
  int last_N = 0;
  for (const auto& row : rows) {
    double L = std::log(row.rho);
    CAPTURE(L);
    CHECK(std::abs(row.I_q - exp_strip_oracle(L, opt.q * row.rho)) <= 3.0 * row.I_q_error + 1e-12);
    CHECK(row.N >= last_N);
    last_N = row.N;
  }
}

TEST_CASE("admissible radius for the exponential orbit of 0") {
  auto f = EntireMap::exponential();
  SweepOptions opt;
  auto grid = exp_grid(8.0, 14.0);
  AdmissibleRho a = find_admissible_rho(f, exp_orbit_of_zero(), grid, opt);
  CHECK(a.margin.margin > 0.0);
  CHECK(a.report.holds());
  CHECK(a.rho > grid.front());
  std::size_t k = 0;
  while (a.sweep[k].rho != a.rho) ++k;
  for (std::size_t j = k + 1; j < a.sweep.size(); ++j) CHECK(a.sweep[j].margin.margin > a.sweep[j - 1].margin.margin);
  for (const auto& row : a.sweep) CHECK(row.N <= row.envelope + 1e-9);
  CHECK(a.A_fit > 0.0);
}

TEST_CASE("slow orbit has no admissible radius") {
  auto f = EntireMap::exponential();
  Polyline slow{cplx(0.0)};
  for (int j = 0; j < 60; ++j) slow.push_back(std::pow(1.5, j));
  try {
    find_admissible_rho(f, OrbitSpec::explicit_orbits({slow}), exp_grid(8.0, 12.0));
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFound);
    CHECK(std::string(e.what()).find("2c") != std::string::npos);
  }
}

TEST_CASE("empty orbit set uses the area alone") {
  auto f = EntireMap::exponential();
  auto grid = exp_grid(14.0, 16.0);
  AdmissibleRho a = find_admissible_rho(f, OrbitSpec{}, grid);
  CHECK(a.rho == grid.front());
  CHECK(a.report.N_rho == 0);
  CHECK(a.margin.margin == doctest::Approx(std::log(1e-3) - std::log(a.sweep.front().I_q)));
}
