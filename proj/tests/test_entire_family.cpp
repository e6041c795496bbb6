#include <cmath>
#include <random>

#include "doctest.h"
#include "thk/entire_family.hpp"

using namespace thk;

namespace {

// Composite Simpson along [0, z]; an independent oracle for the quadrature path.
cplx simpson_sf(const StructurallyFinite& s, cplx z, int n = 20000) {
  cplx acc{};
  for (int k = 0; k <= n; ++k) {
    double t = static_cast<double>(k) / n;
    double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    cplx x = z * t;
    acc += w * poly_eval(s.p, x) * std::exp(poly_eval(s.q, x));
  }
  return s.C + z * acc / (3.0 * n);
}

}  // namespace

TEST_CASE("eval on the three families") {
  CHECK(std::abs(eval(EntireMap::exponential(), 0.0) - 1.0) < 1e-15);
  CHECK(std::abs(eval(EntireMap::cosine(0.5, 0.5), 0.0) - 1.0) < 1e-15);
  auto sf = EntireMap::structurally_finite(0.0, {1.0}, {0.0, 1.0});
  CHECK(std::abs(eval(sf, 1.0) - (std::exp(1.0) - 1.0)) < 1e-14);
  CHECK(std::abs(sf.eval_quadrature(1.0).value() - (std::exp(1.0) - 1.0)) < 1e-13);
}

TEST_CASE("structurally finite closed form agrees with quadrature") {
  auto sf = EntireMap::structurally_finite({0.3, -0.2}, {1.0, {0.5, 0.25}, 0.1}, {0.2, {1.5, -0.5}});
  for (cplx z : {cplx{0.7, 0.2}, cplx{-2.0, 1.0}, cplx{3.0, -2.0}}) {
    cplx a = sf.eval(z), b = sf.eval_quadrature(z).value();
    CHECK(std::abs(a - b) <= 1e-11 * std::abs(a));
  }
}

TEST_CASE("degree two exponent uses quadrature and matches an independent oracle") {
  StructurallyFinite s{0.0, {1.0, 0.5}, {0.0, 0.0, 1.0}};
  auto sf = EntireMap::structurally_finite(s.C, s.p, s.q);
  for (cplx z : {cplx{0.5, 0.5}, cplx{1.5, -0.3}, cplx{-1.0, 1.2}}) {
    cplx a = sf.eval(z), b = simpson_sf(s, z);
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
  }
}

TEST_CASE("eval overflow reports the attempted exponent") {
  auto e = EntireMap::exponential();
  try {
    e.eval(800.0);
    FAIL("expected RangeOverflow");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::RangeOverflow);
    CHECK(err.value() == doctest::Approx(800.0));
  }
  CHECK(e.log_eval(800.0).real() == doctest::Approx(800.0));
}

TEST_CASE("singular values") {
  auto sv = singular_values(EntireMap::exponential());
  REQUIRE(sv.size() == 1);
  CHECK(std::abs(sv[0]) == 0.0);

  // cosh: oracle = Newton on sinh from several seeds in the fundamental strip
  auto cosh_map = EntireMap::cosine(0.5, 0.5);
  std::vector<cplx> oracle;
  for (double y0 : {0.3, 2.9, -0.4}) {
    cplx z{0.2, y0};
    for (int i = 0; i < 60; ++i) z -= std::sinh(z) / std::cosh(z);
    cplx v = std::cosh(z);
    bool seen = false;
    for (cplx o : oracle) seen |= std::abs(o - v) < 1e-9;
    if (!seen) oracle.push_back(v);
  }
  auto cv = singular_values(cosh_map);
  REQUIRE(cv.size() == 2);
  for (cplx o : oracle) {
    bool found = false;
    for (cplx v : cv) found |= std::abs(o - v) < 1e-12;
    CHECK(found);
  }

  auto sf = EntireMap::structurally_finite(0.0, {1.0}, {0.0, 1.0});
  auto s = singular_values(sf);
  REQUIRE(s.size() == 1);
  CHECK(std::abs(s[0] + 1.0) < 1e-12);
}

TEST_CASE("asymptotic values of a degree-two structurally finite map") {
  // C + int_0^{inf e^{i th}} e^{w^2} dw along the two decay rays: +- i sqrt(pi)/2
  auto sf = EntireMap::structurally_finite(0.0, {1.0}, {0.0, 0.0, 1.0});
  auto av = sf.asymptotic_values();
  REQUIRE(av.size() == 2);
  double h = std::sqrt(kPi) / 2.0;
  for (cplx v : av) CHECK(std::abs(std::abs(v.imag()) - h) < 1e-10);
  CHECK(std::abs(av[0] + av[1]) < 1e-10);
}

TEST_CASE("growth exponent") {
  for (const auto& f : {EntireMap::exponential(), EntireMap::cosine(0.5, 0.5),
                        EntireMap::structurally_finite(0.0, {1.0}, {0.0, 0.0, 1.0})}) {
    auto g = growth_exponent(f);
    CHECK(g.d == 1.5);
    CHECK(g.r0 > std::exp(1.0));
    CHECK(std::isfinite(g.r0));
  }
  // direct scan oracle for e^z: log log M(r) = log r
  auto g = growth_exponent(EntireMap::exponential());
  for (double r = g.r0; r < 1e30; r *= 1.7) CHECK(std::log(r) < std::pow(std::log(r), 1.5));
}

TEST_CASE("tract boundaries") {
  auto e = EntireMap::exponential();
  auto tr = tract_boundary(e, std::exp(1.0), 0, 33);
  REQUIRE(tr.boundary.size() == 33);
  for (cplx w : tr.boundary) {
    CHECK(std::abs(w.real() - 1.0) < 1e-12);
    CHECK(w.imag() >= -kPi - 1e-12);
    CHECK(w.imag() <= kPi + 1e-12);
  }
  CHECK(std::abs(tr.boundary.front().imag() + kPi) < 1e-9);
  CHECK(std::abs(tr.boundary.back().imag() - kPi) < 1e-9);

  auto t10 = tract_boundary(e, std::exp(10.0), 2, 17);
  for (cplx w : t10.boundary) CHECK(std::abs(w.real() - 10.0) < 1e-10);
  CHECK(std::abs(t10.base_point - cplx{10.0, 4 * kPi}) < 1e-10);

  auto c = EntireMap::cosine(0.5, 0.5);
  for (int comp : {0, 1}) {
    auto tc = tract_boundary(c, 10.0, 0, 41, comp);
    double worst = 0.0;
    for (cplx w : tc.boundary) worst = std::max(worst, std::abs(std::abs(std::cosh(w)) - 10.0));
    CHECK(worst < 1e-9 * 10.0);
  }
}

TEST_CASE("tract monotonicity") {
  for (const auto& f : {EntireMap::exponential(), EntireMap::cosine(0.5, 0.5),
                        EntireMap::structurally_finite(0.0, {1.0}, {0.0, 1.0})}) {
    double r1 = 20.0, r2 = 200.0;
    auto t1 = tract_boundary(f, r1, 0, 21);
    auto t2 = tract_boundary(f, r2, 0, 21);
    auto l1 = f.tract_label(t1.boundary[10] + 1e-3 * (t2.boundary[10] - t1.boundary[10]), r1);
    REQUIRE(l1.has_value());
    for (cplx w : t2.boundary) {
      auto l = f.tract_label(w, r1);
      REQUIRE(l.has_value());
      CHECK(*l == *l1);
    }
  }
}

TEST_CASE("lift_path examples") {
  auto e = EntireMap::exponential();
  auto l = lift_path(e, {1.0, std::exp(1.0)}, 0.0);
  CHECK(std::abs(l.back() - 1.0) < 1e-12);
  for (cplx z : l) CHECK(std::abs(z.imag()) < 1e-12);

  Polyline circle;
  for (int k = 0; k <= 256; ++k) circle.push_back(std::polar(1.0, kTwoPi * k / 256));
  auto lc = lift_path(e, circle, 0.0);
  CHECK(std::abs(lc.back() - kI * kTwoPi) < 1e-10);

  auto c = EntireMap::cosine(0.5, 0.5);
  auto la = lift_path(c, {1.0, 10.0}, 0.0);
  CHECK(std::abs(std::cosh(la.back()) - 10.0) < 1e-9);
  CHECK(std::abs(std::abs(la.back()) - std::acosh(10.0)) < 1e-9);
}

TEST_CASE("lift errors") {
  auto e = EntireMap::exponential();
  try {
    lift_path(e, {1.0, -1.0}, 0.0);  // passes through the omitted value 0
    FAIL("expected CriticalCollision");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::CriticalCollision);
    CHECK(err.value() == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(lift_path(e, {2.0, 3.0}, 0.0), Error);
}

TEST_CASE("log lifts test the curved image against singular values") {
  // exp maps 8 -> 8 + i pi onto a half circle around 0, not through it
  auto e = EntireMap::exponential();
  auto l = lift_log_path(e, {cplx(8.0), cplx(8.0, kPi)}, 8.0);
  CHECK(std::abs(l.z.back() - cplx(8.0, kPi)) < 1e-9);

  // cosh has critical value -1, at log coordinate i pi + 2 pi i k
  auto c = EntireMap::cosine(0.5, 0.5);
  for (int k : {0, 1}) {
    double y = kPi + kTwoPi * k;
    cplx start = std::acosh(cplx(-std::exp(-1.0)));
    CHECK_THROWS_AS(lift_log_path(c, {cplx(-1.0, y), cplx(1.0, y)}, start), Error);
  }
  CHECK_NOTHROW(lift_log_path(c, {cplx(-1.0, 2.0), cplx(1.0, 2.0)}, std::acosh(std::exp(cplx(-1.0, 2.0)))));
}

TEST_CASE("lift correctness on random polylines") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto c = EntireMap::cosine(0.5, 0.5);
  auto sf = EntireMap::structurally_finite(0.0, {1.0, 0.5}, {0.0, 1.0});
  for (const auto* f : {&c, &sf}) {
    for (int trial = 0; trial < 10; ++trial) {
      cplx start{U(rng) * 1.5, U(rng) * 1.5};
      if (f->local_degree(start) > 1) continue;
      Polyline p{f->eval(start)};
      for (int k = 0; k < 5; ++k) p.push_back(p.back() + cplx{U(rng), U(rng)} * 2.0);
      try {
        auto lz = lift_path_full(*f, p, start);
        double mx = 0.0;
        for (cplx w : p) mx = std::max(mx, std::abs(w));
        for (std::size_t k = 0; k < p.size(); ++k)
          CHECK(std::abs(f->eval(lz.z[lz.vertex_index[k]]) - p[k]) < 1e-8 * std::max(1.0, mx));
      } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::CriticalCollision);
      }
    }
  }
}

TEST_CASE("2 pi i equivariance of exponential lifts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto e = EntireMap::exponential();
  for (int trial = 0; trial < 10; ++trial) {
    cplx s{U(rng), U(rng)};
    Polyline p{std::exp(s)};
    for (int k = 0; k < 4; ++k) p.push_back(p.back() * std::exp(cplx{0.3 * U(rng), 2.0 * U(rng)}));
    auto a = lift_path_full(e, p, s);
    for (int k : {-2, 3}) {
      auto b = lift_path_full(e, p, s + kI * (kTwoPi * k));
      for (std::size_t v = 0; v < p.size(); ++v)
        CHECK(std::abs(b.z[b.vertex_index[v]] - a.z[a.vertex_index[v]] - kI * (kTwoPi * k)) < 1e-10);
    }
  }
}

TEST_CASE("structurally finite evaluation is path independent") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  auto sf = EntireMap::structurally_finite({0.1, 0.2}, {1.0, {0.0, 0.3}}, {0.0, 0.5, {0.2, 0.1}});
  for (int trial = 0; trial < 10; ++trial) {
    cplx z{U(rng), U(rng)};
    cplx m1{U(rng), U(rng)}, m2{U(rng), U(rng)};
    cplx a = sf.eval_along({0.0, m1, z}).value();
    cplx b = sf.eval_along({0.0, m2, m1, z}).value();
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
  }
}
