#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "thk/thurston.hpp"

using namespace thk;

namespace {

const cplx kKappa(std::log(kTwoPi), kPi / 2.0);

MarkedConfig misiurewicz_at(cplx kappa, cplx a1) { return make_config(Portrait::misiurewicz_2pi(), {{kappa, a1}}); }

// Newton on g(g(k)) - g(k) = 0 with g(z) = e^z + k, derivative by hand
cplx newton_oracle(cplx k) {
  for (int it = 0; it < 60; ++it) {
    cplx e1 = std::exp(k), g1 = e1 + k;
    cplx e2 = std::exp(g1);
    cplx F = e2 - e1;  // g(g(k)) - g(k) = e^{g1} + k - e1 - k
    cplx dF = e2 * (e1 + 1.0) - e1;
    cplx step = F / dF;
    k -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return k;
}

}  // namespace

TEST_CASE("portrait validation") {
  Portrait p = Portrait::misiurewicz_2pi();
  CHECK_NOTHROW(p.validate());
  CHECK(p.successor(0, 0) == 1);
  CHECK(p.successor(0, 1) == 1);
  CHECK(p.point_count() == 2);

  Portrait bad = p;
  bad.orbits[0].addresses = {0};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.orbits[0].loop_to = 2;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.orbits[0].tail = cplx(5.0);
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(Portrait::truncated(3, 100.0, {0}), Error);
  try {
    Portrait::by_name("nope");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
  CHECK(Portrait::by_name("escaping-4").orbits[0].length == 4);
}

TEST_CASE("sigma fixes the closed-form configuration") {
  // e^kappa = 2 pi i, so g(kappa) = kappa + 2 pi i and g(kappa + 2 pi i) = kappa + 2 pi i
  CHECK(std::abs(std::exp(kKappa) - cplx(0.0, kTwoPi)) < 1e-14);
  Portrait p = Portrait::misiurewicz_2pi();
  MarkedConfig c = misiurewicz_at(kKappa, kKappa + kI * kTwoPi);
  MarkedConfig s = sigma_step(c, p);
  CHECK(std::abs(s.positions[0][0] - c.positions[0][0]) < 1e-12);
  CHECK(std::abs(s.positions[0][1] - c.positions[0][1]) < 1e-12);
  CHECK(forward_residual(c, p) < 1e-14);
}

TEST_CASE("sigma contracts a small translation") {
  Portrait p = Portrait::misiurewicz_2pi();
  MarkedConfig c = misiurewicz_at(kKappa, kKappa + kI * kTwoPi);
  for (cplx t : {cplx(1e-3, 0.0), cplx(0.0, 1e-3), cplx(-7e-4, 7e-4)}) {
    MarkedConfig moved = c;
    for (auto& z : moved.positions[0]) z += t;
    double in = config_distance(c, moved);
    double out = config_distance(sigma_step(c, p), sigma_step(moved, p));
    CHECK(out <= in);
  }
}

TEST_CASE("a singular value mapping to itself collides") {
  Portrait p;
  p.orbits.push_back({1, 0, {0}, std::nullopt});
  MarkedConfig c = make_config(p, {{cplx(0.3, 0.2)}});
  try {
    sigma_step(c, p);
    FAIL("expected SingularCollision");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularCollision);
  }
}

TEST_CASE("Misiurewicz fixed point from random inits") {
  Portrait p = Portrait::misiurewicz_2pi();
  cplx oracle = newton_oracle(kKappa + cplx(0.05, -0.05));
  CHECK(std::abs(oracle - kKappa) < 1e-14);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    cplx k0 = kKappa + cplx(U(rng), U(rng));
    cplx a0 = kKappa + kI * kTwoPi + cplx(U(rng), U(rng));
    FixedPoint fp = solve_fixed_point(p, misiurewicz_at(k0, a0), 1e-9, 200);
    CAPTURE(trial);
    CHECK(std::abs(fp.kappa - oracle) < 1e-9);
    CHECK(fp.iterations <= 200);
    CHECK(fp.residual < 1e-8);
    CHECK(fp.trace.step_deltas.size() == static_cast<std::size_t>(fp.iterations));
    CHECK(fp.trace.configs.size() == fp.trace.parameter_track.size());
    for (double d : fp.trace.step_deltas) CHECK(d >= 0.0);
    CHECK(recover_addresses(fp.config, p) == std::vector<std::vector<int>>{{0, 1}});
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 5.0);
}

TEST_CASE("default init converges for the shipped portraits") {
  for (const char* name : {"misiurewicz-2pi", "escaping-4"}) {
    Portrait p = Portrait::by_name(name);
    FixedPoint fp = solve_fixed_point(p, default_init(p), 1e-9, 200);
    CAPTURE(name);
    CHECK(fp.residual < 1e-8);
    CHECK(recover_addresses(fp.config, p) == std::vector<std::vector<int>>{p.orbits[0].addresses});
  }
}

TEST_CASE("truncated escaping portrait recovers its parameter") {
  // the tail is the third iterate of kappa = 1, so kappa = 1 is the fixed point
  Portrait p = Portrait::by_name("escaping-4");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    MarkedConfig init = make_config(p, {{cplx(1.0 + U(rng), U(rng)), cplx(4.0 + U(rng), U(rng)),
                                         cplx(40.0 + U(rng), U(rng)), cplx(0.0)}});
    FixedPoint fp = solve_fixed_point(p, init, 1e-9, 200);
    CHECK(std::abs(fp.kappa - 1.0) < 1e-9);
    CHECK(fp.residual < 1e-8);
    CHECK(fp.config.positions[0][3] == *p.orbits[0].tail);
  }
}

TEST_CASE("non-convergence keeps the trace") {
  Portrait p = Portrait::misiurewicz_2pi();
  IterationTrace tr;
  try {
    solve_fixed_point(p, misiurewicz_at(cplx(1.0, 1.0), cplx(2.0, 8.0)), 1e-9, 2, &tr);
    FAIL("expected MaxIterExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MaxIterExceeded);
  }
  CHECK(tr.configs.size() == 3);
  CHECK(tr.step_deltas.size() == 2);
  CHECK_THROWS_AS(solve_fixed_point(p, default_init(p), 0.0, 10), Error);
}

TEST_CASE("contraction diagnostic") {
  Portrait p = Portrait::misiurewicz_2pi();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-0.1, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    MarkedConfig a = misiurewicz_at(kKappa + cplx(U(rng), U(rng)), kKappa + kI * kTwoPi + cplx(U(rng), U(rng)));
    MarkedConfig b = misiurewicz_at(a.positions[0][0] + cplx(U(rng), U(rng)), a.positions[0][1] + cplx(U(rng), U(rng)));
    auto r = contraction_diagnostic(p, a, b, 8);
    REQUIRE(r.size() == 8);
    REQUIRE(r[0].has_value());
    for (const auto& x : r)
      if (x) CHECK(*x < 1.0);
  }

  MarkedConfig a = misiurewicz_at(kKappa + 0.3, kKappa + kI * kTwoPi);
  auto same = contraction_diagnostic(p, a, a, 4);
  REQUIRE(same.size() == 4);
  for (const auto& x : same) CHECK_FALSE(x.has_value());

  Portrait e = Portrait::by_name("escaping-4");
  MarkedConfig u = default_init(e), v = default_init(e);
  v.pins[0].value *= 2.0;
  repin(v);
  CHECK_THROWS_AS(contraction_diagnostic(e, u, v, 3), Error);
}

TEST_CASE("repinning is idempotent") {
  Portrait p = Portrait::by_name("escaping-4");
  MarkedConfig c = default_init(p);
  c.positions[0][3] = cplx(7.0, 7.0);
  MarkedConfig once = c, twice = c;
  repin(once);
  repin(twice);
  repin(twice);
  CHECK(once.positions == twice.positions);
  CHECK(once.positions[0][3] == *p.orbits[0].tail);
  // pins survive every step
  MarkedConfig s = sigma_step(once, p);
  CHECK(s.positions[0][3] == *p.orbits[0].tail);
}

TEST_CASE("moving an unreferenced point changes only its preimage") {
  Portrait p = Portrait::misiurewicz_2pi();
  p.orbits.push_back({3, -1, {0, 0}, cplx(30.0, 1.0)});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    MarkedConfig c = make_config(p, {{kKappa + cplx(U(rng), U(rng)), kKappa + kI * kTwoPi},
                                     {cplx(1.0 + U(rng), U(rng)), cplx(5.0 + U(rng), U(rng)), cplx(0.0)}});
    MarkedConfig moved = c;
    moved.positions[1][1] += cplx(U(rng), U(rng)) * 0.5;
    MarkedConfig s = sigma_step(c, p), t = sigma_step(moved, p);
    CHECK(s.positions[0] == t.positions[0]);
    CHECK(s.positions[1][1] == t.positions[1][1]);
    CHECK(s.positions[1][2] == t.positions[1][2]);
    CHECK(s.positions[1][0] != t.positions[1][0]);
  }
}
