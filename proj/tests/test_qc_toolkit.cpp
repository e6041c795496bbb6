#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "thk/cyl_area.hpp"
#include "thk/dilatation.hpp"
#include "thk/modulus.hpp"
#include "thk/qc_maps.hpp"
#include "thk/qc_probes.hpp"

using namespace thk;

namespace {

// extended precision keeps the complementary modulus accurate near r = 0
double mu_oracle(double r) {
  using big = boost::multiprecision::cpp_bin_float_50;
  big k = r, kp = sqrt(1 - k * k);
  big v = boost::math::constants::half_pi<big>() * boost::math::ellint_1(kp) / boost::math::ellint_1(k);
  return static_cast<double>(v);
}

PlaneMap as_plane(const QcMap& m) {
  return [m](cplx z) { return m(z); };
}

double sup_D(const QcMap& m, const GridSpec& g) { return measure_dilatation(as_plane(m), g).sup_D; }

const double kGolden = (3.0 + std::sqrt(5.0)) / 2.0;

// random constructor whose dilatation lives in the annulus 0.2 < |z| < 1.5
QcMap random_map(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (rng() % 4) {
    case 0:
      return QcMap::radial_power(0.2 + 0.3 * u(rng), 1.0 + 0.5 * u(rng), 0.4 + 2.0 * u(rng));
    case 1:
      return QcMap::annulus_twist(-6.0 + 12.0 * u(rng), 0.2 + 0.3 * u(rng), 1.0 + 0.5 * u(rng));
    case 2:
      return QcMap::affine(1.0 + u(rng), u(rng) - 0.5, u(rng) - 0.5, 1.0 + u(rng));
    default:
      return QcMap::push_point_in_disk(cplx{u(rng) - 0.5, u(rng) - 0.5}, cplx{u(rng) - 0.5, u(rng) - 0.5});
  }
}

}  // namespace

TEST_CASE("annulus modulus") {
  CHECK(annulus_modulus(1.0, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(annulus_modulus(2.0, 2.0 * std::exp(3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(annulus_modulus(1.0, 1.0), Error);
  CHECK_THROWS_AS(annulus_modulus(0.0, 1.0), Error);
}

TEST_CASE("Grotzsch modulus against elliptic integrals") {
  CHECK(grotzsch_mu(1.0 / std::sqrt(2.0)) == doctest::Approx(kPi / 2).epsilon(1e-14));
  double r = 0.3;
  CHECK(std::fabs(grotzsch_mu(r) * grotzsch_mu(std::sqrt(1 - r * r)) - kPi * kPi / 4) < 1e-10);
  for (double x : {1e-6, 1e-3, 0.1, 0.3, 0.5, 0.9, 0.99, 0.999999}) CHECK(std::fabs(grotzsch_mu(x) - mu_oracle(x)) < 1e-12);
  double prev = 0.0;
  for (double x : {1e-2, 1e-4, 1e-6, 1e-8}) {
    double gap = std::fabs(grotzsch_mu(x) - std::log(4.0 / x));
    if (prev > 0.0) CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-14);
  for (int k = 1; k < 1000; ++k) CHECK(grotzsch_mu(k / 1000.0) > grotzsch_mu((k + 1) / 1000.0 - 1e-12));
  CHECK_THROWS_AS(grotzsch_mu(0.0), Error);
  CHECK_THROWS_AS(grotzsch_mu(1.0), Error);
}

TEST_CASE("radial stretch") {
  auto id = QcMap::radial_stretch(0.5, 0.5);
  CHECK(id.K_estimate() == 1.0);
  CHECK(std::abs(id(cplx{0.3, 0.2}) - cplx{0.3, 0.2}) < 1e-15);

  auto s = QcMap::radial_stretch(0.5, 0.25);
  CHECK(*s.closed_form_K() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::fabs(sup_D(s, GridSpec::log_polar(0.5, 1.0, 32, 64)) - 2.0) < 1e-6);
  for (int j = 0; j < 16; ++j) {
    cplx e = std::polar(1.0, kTwoPi * j / 16);
    CHECK(std::abs(s(e) - e) < 1e-15);
    CHECK(std::abs(s(0.3 * e) - 0.15 * e) < 1e-15);
  }
  auto two = QcMap::composite({QcMap::radial_stretch(0.5, 0.3), QcMap::radial_stretch(0.3, 0.1)});
  auto direct = QcMap::radial_stretch(0.5, 0.1);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 8; ++j) {
      cplx z = std::polar(0.05 + 1.2 * i / 40, 0.7 * j);
      CHECK(std::abs(two(z) - direct(z)) < 1e-10);
    }
  CHECK_THROWS_AS(QcMap::radial_stretch(0.5, 0.6), Error);
}

TEST_CASE("annulus twist dilatation depends on twist per modulus") {
  CHECK(QcMap::annulus_twist(0.0, 1.0, 2.0).K_estimate() == 1.0);
  auto t1 = QcMap::annulus_twist(kTwoPi, 1.0, std::exp(kTwoPi));
  auto t2 = QcMap::annulus_twist(kPi, 1.0, std::exp(kPi));
  CHECK(*t1.closed_form_K() == doctest::Approx(kGolden).epsilon(1e-14));
  CHECK(*t2.closed_form_K() == doctest::Approx(kGolden).epsilon(1e-14));
  CHECK(std::fabs(sup_D(t2, GridSpec::log_polar(1.0, std::exp(kPi), 32, 64)) - kGolden) < 1e-6);
  auto t3 = QcMap::annulus_twist(1.0, 0.5, 0.8);
  CHECK(std::fabs(sup_D(t3, GridSpec::log_polar(0.5, 0.8, 16, 64)) - *t3.closed_form_K()) < 1e-6);
  CHECK(std::abs(t3(cplx{0.0, 0.4}) - cplx{0.0, 0.4}) < 1e-15);
  CHECK(std::abs(t3(2.0) - std::polar(2.0, 1.0)) < 1e-14);
}

TEST_CASE("measured dilatation of affine and conformal maps") {
  auto A = QcMap::affine(1.5, 0.0, 0.0, 0.5);  // z + conj(z) / 2
  CHECK(*A.closed_form_K() == doctest::Approx(3.0).epsilon(1e-14));
  auto f = measure_dilatation(as_plane(A), GridSpec::cartesian(-1, 1, -1, 1, 16, 16));
  for (double D : f.D) CHECK(std::fabs(D - 3.0) < 1e-10);

  auto sq = measure_dilatation([](cplx z) { return z * z; }, GridSpec::log_polar(0.5, 2.0, 32, 64));
  for (double D : sq.D) CHECK(std::fabs(D - 1.0) < 1e-8);
  CHECK(sq.cylindrical_integral < 1e-8);
  CHECK(sq.excluded == 0);

  CHECK_THROWS_AS(QcMap::affine(1, 0, 0, -1), Error);
  try {
    measure_dilatation([](cplx z) { return std::conj(z); }, GridSpec::cartesian(1, 2, 1, 2, 4, 4));
    FAIL("expected NotQuasiconformalAt");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotQuasiconformalAt);
  }
}

TEST_CASE("push moves one point and fixes the circle") {
  auto same = QcMap::push_point_in_disk(0.3, 0.3);
  CHECK(same.K_estimate() == 1.0);

  auto p = QcMap::push_point_in_disk(0.0, 0.5);
  CHECK(std::abs(p(0.0) - 0.5) < 1e-14);
  CHECK(std::abs(p.apply_inverse(0.5)) < 1e-12);
  for (int j = 0; j < 64; ++j) {
    cplx e = std::polar(1.0, kTwoPi * j / 64);
    CHECK(std::abs(p(e) - e) < 1e-12);
    CHECK(std::abs(p(std::polar(1.0 - 1e-9, kTwoPi * j / 64)) - (1.0 - 1e-9) * e) < 1e-7);
  }
  double K = p.K_estimate();
  CHECK(std::isfinite(K));
  double measured = sup_D(p, GridSpec::cartesian(-1, 1, -1, 1, 96, 96));
  CHECK(measured <= K * (1 + 1e-6));
  CHECK(measured >= 0.9 * K);

  auto q = QcMap::push_point_in_disk(cplx{0.2, -0.4}, cplx{-0.5, 0.1}, 2.0);
  CHECK(std::abs(q(cplx{0.2, -0.4}) - cplx{-0.5, 0.1}) < 1e-13);
  CHECK(std::abs(q(cplx{0.0, 2.0}) - cplx{0.0, 2.0}) < 1e-15);
}

TEST_CASE("push dilatation grows like log squared") {
  double prev_ratio = 1e9;
  for (double delta : {0.2, 0.1, 0.05, 0.02, 0.01}) {
    double K = QcMap::push_point_in_disk(0.0, 1.0 - delta).K_estimate();
    double L = std::log(1.0 / delta);
    CHECK(K <= kPushConstant * (1.0 + L * L));
    double ratio = K / (L * L);
    CHECK(ratio < prev_ratio);
    prev_ratio = ratio;
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int k = 0; k < 40; ++k) {
    cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
    double m = std::max(std::abs(a), std::abs(b));
    if (m >= 0.99) continue;
    double L = std::log(1.0 / (1.0 - m));
    CHECK(QcMap::push_point_in_disk(a, b).K_estimate() <= kPushConstant * (1.0 + L * L));
  }
}

TEST_CASE("inverses round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.6, 1.6);
  for (int k = 0; k < 30; ++k) {
    QcMap m = random_map(rng);
    QcMap lifted = QcMap::power_lift(m, 1 + static_cast<int>(rng() % 3));
    for (int j = 0; j < 20; ++j) {
      cplx z{u(rng), u(rng)};
      CHECK(std::abs(m.apply_inverse(m(z)) - z) < 1e-10);
      CHECK(std::abs(lifted.apply_inverse(lifted(z)) - z) < 1e-10);
    }
  }
}

TEST_CASE("lift and conjugation laws") {
  auto tw = QcMap::annulus_twist(2.0, 0.5, 1.0);
  for (int d : {1, 2, 3}) {
    auto L = QcMap::power_lift(tw, d);
    CHECK(L.K_estimate() == doctest::Approx(d * tw.K_estimate()).epsilon(1e-15));
    double s = sup_D(L, GridSpec::log_polar(0.5, 1.0, 16, 64));
    CHECK(s <= d * tw.K_estimate() * (1 + 1e-6));
    if (d == 1) CHECK(std::fabs(s - tw.K_estimate()) < 1e-6);
  }
  auto A = QcMap::affine(2.0, 0.3, 0.0, 1.0);
  double K1 = A.K_estimate();
  auto c = QcMap::conjugate(A, tw);
  double s = sup_D(c, GridSpec::cartesian(-2.5, 2.5, -1.5, 1.5, 100, 60));
  CHECK(s <= K1 * K1 * tw.K_estimate() * (1 + 1e-6));
  CHECK(s >= tw.K_estimate() * (1 - 1e-3));
}

TEST_CASE("composite dilatation is submultiplicative") {
  std::mt19937_64 rng(21);
  auto grid = GridSpec::cartesian(-1.6, 1.6, -1.6, 1.6, 64, 64);
  for (int k = 0; k < 20; ++k) {
    QcMap f = random_map(rng), g = random_map(rng);
    auto fg = QcMap::composite({g, f});
    CHECK(sup_D(fg, grid) <= f.K_estimate() * g.K_estimate() * (1 + 1e-6));
  }
}

TEST_CASE("circle image ratio stays below exp(pi K)") {
  std::vector<QcMap> maps{QcMap::radial_stretch(0.5, 0.2), QcMap::annulus_twist(3.0, 0.3, 0.9)};
  auto p1 = QcMap::push_point_in_disk(cplx{0.4, 0.1}, -0.3);
  maps.push_back(QcMap::composite({p1, QcMap::push_point_in_disk(p1(0.0), 0.0)}));
  auto p2 = QcMap::push_point_in_disk(0.1, cplx{0.0, 0.8});
  maps.push_back(QcMap::composite({p2, QcMap::push_point_in_disk(p2(0.0), 0.0)}));
  for (const auto& m : maps) {
    CHECK(std::abs(m(0.0)) < 1e-12);
    for (double r : {0.05, 0.2, 0.5, 0.8, 0.95})
      CHECK(max_over_min_ratio(m, r) <= std::exp(kPi * m.K_estimate()) * (1 + 1e-6));
  }
  CHECK(max_over_min_ratio(maps[2], 0.5) > 1.01);
}

TEST_CASE("twist bound") {
  CHECK(twist_bound(100.0, 1.0) == 0);
  CHECK(twist_bound(std::exp(13.0), 1.0) == 2);
  CHECK(twist_bound(std::exp(4 * kPi), 1.0) == 2);
  CHECK(twist_bound(std::exp(4 * kPi), 1.0, 1.0, BoundConvention::Strict) == 1);
  CHECK(twist_bound(std::exp(13.0), 1.0, 1.0, BoundConvention::Strict) == 2);
  for (double C : {0.5, 1.0, 1.5, 3.0}) CHECK(twist_bound(std::exp(kTwoPi), std::pow(2.0, C), C) == 2);
  CHECK(twist_bound(cplx{0.0, std::exp(kTwoPi)}, 3.0) == 3);
  CHECK_THROWS_AS(twist_bound(2.0, 1.0), Error);
  CHECK_THROWS_AS(twist_bound(10.0, 0.5), Error);
  CHECK_THROWS_AS(twist_bound(10.0, 1.0, 0.0), Error);
}

TEST_CASE("Rengel bounds") {
  Quadrilateral rect{{{0, 0}, {3, 0}, {3, 1}, {0, 1}}, {0, 1, 2, 3}};
  auto b = rengel_bounds(rect);
  CHECK(b.lower == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(b.upper == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(b.area == doctest::Approx(3.0));

  Quadrilateral square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 1, 2, 3}};
  auto s = rengel_bounds(square);
  CHECK(s.lower == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.upper == doctest::Approx(1.0).epsilon(1e-9));

  // rectangle with extra collinear boundary vertices
  Quadrilateral padded{{{0, 0}, {1, 0}, {2, 0}, {2, 0.5}, {2, 1}, {0, 1}}, {0, 2, 4, 5}};
  auto pb = rengel_bounds(padded);
  CHECK(pb.lower == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(pb.upper == doctest::Approx(2.0).epsilon(1e-9));

  Quadrilateral ell{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {0, 1, 3, 4}};
  auto e = rengel_bounds(ell);
  CHECK(e.area == doctest::Approx(3.0));
  CHECK(e.lower < e.upper);
  CHECK(e.s_a == doctest::Approx(1.0).epsilon(1e-9));           // bottom edge to the inner vertical edge
  CHECK(e.s_b == doctest::Approx(1.0).epsilon(1e-9));

  Quadrilateral bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {0, 1, 2, 3}};
  CHECK_THROWS_AS(rengel_bounds(bowtie), Error);
  Quadrilateral clockwise{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {0, 1, 2, 3}};
  try {
    rengel_bounds(clockwise);
    FAIL("expected InvalidQuadrilateral");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::InvalidQuadrilateral);
  }
}

TEST_CASE("inner distance bends around reflex corners") {
  Polyline U{{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  CHECK(inner_distance(U, {{1, 3}, {0, 3}}, {{3, 3}, {2, 3}}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(inner_distance(U, {{0, 3}, {0, 0}}, {{3, 0}, {3, 3}}) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("distortion probe") {
  std::vector<double> kappas{0.4, 0.2, 0.1, 0.05, 0.025, 0.0};
  auto rows = distortion_probe(kappas);
  REQUIRE(rows.size() == kappas.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::fabs(rows[i].displacement - rows[i].closed_form) < 1e-8);
    CHECK(std::fabs(rows[i].closed_form - kappas[i]) < 1e-12);
    CHECK(std::fabs(rows[i].measured_integral - kappas[i]) < 1e-6);
    if (i > 0) CHECK(rows[i].displacement < rows[i - 1].displacement);
  }
  CHECK(rows.back().displacement == 0.0);
  CHECK_THROWS_AS(distortion_probe({0.1, 0.2}), Error);
  CHECK_THROWS_AS(distortion_probe({-0.1}), Error);
}

TEST_CASE("modulus difference") {
  auto id = modulus_difference_check(QcMap::identity(), 0.5, 2.0);
  CHECK(id.lhs == 0.0);
  CHECK(id.rhs < 1e-12);
  CHECK(id.holds);

  auto st = modulus_difference_check(QcMap::radial_stretch(0.5, 0.25), 0.5, 1.0);
  CHECK(st.lhs == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(st.holds);
  CHECK(st.excluded == 0);

  auto tw = modulus_difference_check(QcMap::annulus_twist(2.0, 0.5, 1.5), 0.5, 1.5);
  CHECK(tw.lhs < 1e-14);
  CHECK(tw.rhs > 0.1);
  CHECK(tw.holds);

  CHECK_THROWS_AS(modulus_difference_check(QcMap::affine(2, 0, 0, 1), 0.5, 1.0), Error);
}

TEST_CASE("parallel and serial measurement agree bitwise") {
  auto m = QcMap::composite({QcMap::annulus_twist(2.0, 0.3, 1.0), QcMap::push_point_in_disk(0.1, -0.2)});
  auto g = GridSpec::cartesian(-1.2, 1.2, -1.2, 1.2, 48, 48);
  auto a = measure_dilatation(as_plane(m), g);
  auto b = measure_dilatation_reference(as_plane(m), g);
  CHECK(a.sup_D == b.sup_D);
  CHECK(a.cylindrical_integral == b.cylindrical_integral);
  CHECK(a.excluded == b.excluded);
  for (std::size_t i = 0; i < a.D.size(); ++i) CHECK(((std::isnan(a.D[i]) && std::isnan(b.D[i])) || a.D[i] == b.D[i]));
}

TEST_CASE("halving the difference step leaves sup D unchanged") {
  std::vector<std::pair<QcMap, GridSpec>> cases{
      {QcMap::radial_stretch(0.5, 0.25), GridSpec::log_polar(0.5, 1.0, 16, 32)},
      {QcMap::annulus_twist(kPi, 1.0, std::exp(kPi)), GridSpec::log_polar(1.0, std::exp(kPi), 48, 96)},
      {QcMap::affine(1.5, 0.2, -0.1, 0.5), GridSpec::cartesian(-1, 1, -1, 1, 8, 8)},
      {QcMap::push_point_in_disk(0.0, 0.5), GridSpec::log_polar(0.05, 0.95, 32, 64)},
  };
  for (const auto& [m, g] : cases) {
    DilatationOptions fine;
    fine.step_fraction = 1.0 / 16.0;
    double s1 = measure_dilatation(as_plane(m), g).sup_D;
    double s2 = measure_dilatation(as_plane(m), g, fine).sup_D;
    CHECK(std::fabs(s1 - s2) < 1e-7);
  }
}
