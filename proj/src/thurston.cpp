#include "thk/thurston.hpp"

#include <algorithm>
#include <cmath>

#include "thk/cyl_area.hpp"

namespace thk {

Portrait Portrait::misiurewicz_2pi() {
  Portrait p;
  p.name = "misiurewicz-2pi";
  // a_00 = kappa = log(2 pi i) on the principal branch, a_01 = kappa + 2 pi i on the next
  p.orbits.push_back({2, 1, {0, 1}, std::nullopt});
  return p;
}

Portrait Portrait::truncated(int n, cplx tail, std::vector<int> addresses) {
  Portrait p;
  p.name = "truncated-" + std::to_string(n);
  p.orbits.push_back({n, -1, std::move(addresses), tail});
  p.validate();
  return p;
}

Portrait Portrait::by_name(const std::string& name) {
  if (name == "misiurewicz-2pi") return misiurewicz_2pi();
  if (name == "escaping-4") {
    // forward orbit of kappa = 1 frozen after three steps
    cplx a = 1.0;
    for (int j = 0; j < 3; ++j) a = std::exp(a) + 1.0;
    return truncated(4, a, {0, 0, 0});
  }
  fail(ErrorKind::InvalidConfig, "unknown portrait '" + name + "' (known: misiurewicz-2pi, escaping-4)");
}

void Portrait::validate() const {
  if (orbits.empty() || orbits[0].length < 1) fail(ErrorKind::InvalidConfig, "portrait needs a singular orbit");
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto& o = orbits[i];
    std::string at = "orbit " + std::to_string(i);
    if (o.length < 1) fail(ErrorKind::InvalidConfig, at + " is empty");
    if (o.loop_to >= o.length) fail(ErrorKind::InvalidConfig, at + " loops past its end");
    bool looped = o.loop_to >= 0;
    std::size_t want = static_cast<std::size_t>(looped ? o.length : o.length - 1);
    if (o.addresses.size() != want)
      fail(ErrorKind::InvalidConfig, at + " needs " + std::to_string(want) + " addresses", {},
           static_cast<double>(o.addresses.size()));
    if (looped == o.tail.has_value())
      fail(ErrorKind::InvalidConfig, at + " must either loop or have a pinned tail");
  }
}

int Portrait::successor(int i, int j) const {
  const auto& o = orbits.at(i);
  if (j + 1 < o.length) return j + 1;
  return o.loop_to;
}

std::size_t Portrait::point_count() const {
  std::size_t n = 0;
  for (const auto& o : orbits) n += static_cast<std::size_t>(o.length);
  return n;
}

bool MarkedConfig::pinned(int i, int j) const {
  return std::any_of(pins.begin(), pins.end(), [&](const Pin& p) { return p.orbit == i && p.index == j; });
}

void repin(MarkedConfig& c) {
  for (const auto& p : c.pins) c.positions.at(p.orbit).at(p.index) = p.value;
}

MarkedConfig make_config(const Portrait& p, std::vector<std::vector<cplx>> positions) {
  p.validate();
  if (positions.size() != p.orbits.size()) fail(ErrorKind::InvalidConfig, "one position list per orbit");
  MarkedConfig c;
  for (std::size_t i = 0; i < p.orbits.size(); ++i) {
    const auto& o = p.orbits[i];
    if (positions[i].size() != static_cast<std::size_t>(o.length))
      fail(ErrorKind::InvalidConfig, "orbit " + std::to_string(i) + " has the wrong number of positions");
    c.addresses.push_back(o.addresses);
    if (o.tail) c.pins.push_back({static_cast<int>(i), o.length - 1, *o.tail});
  }
  c.positions = std::move(positions);
  repin(c);
  return c;
}

MarkedConfig default_init(const Portrait& p) {
  p.validate();
  std::vector<std::vector<cplx>> pos;
  for (const auto& o : p.orbits) {
    std::vector<cplx> v;
    for (int j = 0; j < o.length; ++j) {
      int a = j < static_cast<int>(o.addresses.size()) ? o.addresses[j] : 0;
      int prev = j > 0 ? o.addresses[j - 1] : 0;
      v.push_back(cplx(j + 1.0, j + 1.0) + kI * (kTwoPi * std::max(a, prev)));
    }
    pos.push_back(std::move(v));
  }
  return make_config(p, std::move(pos));
}

MarkedConfig sigma_step(const MarkedConfig& c, const Portrait& p, int step, std::vector<StepWarning>& warnings) {
  const cplx kappa = c.kappa();
  MarkedConfig out = c;
  for (std::size_t i = 0; i < p.orbits.size(); ++i) {
    const int n = p.orbits[i].length;
    for (int j = 0; j < n; ++j) {
      int s = p.successor(static_cast<int>(i), j);
      if (s < 0) continue;
      cplx w = c.positions[i][s] - kappa;
      if (w == cplx(0.0))
        fail(ErrorKind::SingularCollision,
             "a[" + std::to_string(i) + "][" + std::to_string(s) + "] sits on the singular value " + fmt_cplx(kappa),
             kappa);
      cplx z = std::log(w) + kI * (kTwoPi * c.addresses[i][j]);
      double jump = std::abs(z.imag() - c.positions[i][j].imag());
      if (jump > kPi) warnings.push_back({step, static_cast<int>(i), j, jump});
      out.positions[i][j] = z;
    }
  }
  repin(out);
  return out;
}

MarkedConfig sigma_step(const MarkedConfig& c, const Portrait& p) {
  std::vector<StepWarning> ignored;
  return sigma_step(c, p, 0, ignored);
}

double config_distance(const MarkedConfig& a, const MarkedConfig& b) {
  if (a.positions.size() != b.positions.size()) fail(ErrorKind::DomainError, "configs of different shape");
  double d = 0.0;
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    if (a.positions[i].size() != b.positions[i].size()) fail(ErrorKind::DomainError, "configs of different shape");
    for (std::size_t j = 0; j < a.positions[i].size(); ++j) {
      if (a.pinned(static_cast<int>(i), static_cast<int>(j))) continue;
      d = std::max(d, cyl_dist(a.positions[i][j], b.positions[i][j]));
    }
  }
  return d;
}

namespace {

double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// relative error of g(a) = e^a + kappa against b, without forming e^a when it overflows
double map_err(cplx a, cplx kappa, cplx b) {
  if (a.real() < 700.0) return rel_err(std::exp(a) + kappa, b);
  if (b - kappa == cplx(0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(1.0 - std::exp(std::log(b - kappa) - a)) * std::abs(b - kappa) / std::max(1.0, std::abs(b));
}

}  // namespace

double forward_residual(const MarkedConfig& c, const Portrait& p) {
  const cplx kappa = c.kappa();
  double r = 0.0;
  // singular orbit: genuine forward iteration while it stays representable
  {
    const auto& pos = c.positions[0];
    cplx s = kappa;
    int j = 0;
    for (; j + 1 < static_cast<int>(pos.size()) && s.real() < 700.0; ++j) {
      s = std::exp(s) + kappa;
      r = std::max(r, rel_err(s, pos[j + 1]));
    }
    for (; j + 1 < static_cast<int>(pos.size()); ++j) r = std::max(r, map_err(pos[j], kappa, pos[j + 1]));
    int back = p.orbits[0].loop_to;
    if (back >= 0) r = std::max(r, map_err(pos.back(), kappa, pos[back]));
  }
  for (std::size_t i = 1; i < p.orbits.size(); ++i)
    for (int j = 0; j < p.orbits[i].length; ++j) {
      int s = p.successor(static_cast<int>(i), j);
      if (s >= 0) r = std::max(r, map_err(c.positions[i][j], kappa, c.positions[i][s]));
    }
  return r;
}

FixedPoint solve_fixed_point(const Portrait& p, const MarkedConfig& init, double tol, int max_iter,
                             IterationTrace* trace_out) {
  p.validate();
  if (!(tol > 0.0)) fail(ErrorKind::DomainError, "tol must be positive", {}, tol);
  if (max_iter < 1) fail(ErrorKind::DomainError, "max_iter must be at least 1", {}, max_iter);
  FixedPoint fp;
  IterationTrace& tr = trace_out ? *trace_out : fp.trace;
  tr = {};
  MarkedConfig c = init;
  repin(c);
  tr.configs.push_back(c);
  tr.parameter_track.push_back(c.kappa());
  for (int k = 1; k <= max_iter; ++k) {
    MarkedConfig next = sigma_step(c, p, k, tr.warnings);
    double d = config_distance(c, next);
    c = std::move(next);
    tr.configs.push_back(c);
    tr.step_deltas.push_back(d);
    tr.parameter_track.push_back(c.kappa());
    // small steps do not bound the forward residual on escaping orbits, where
    // exp amplifies the error in kappa; keep going while steps still shrink
    if (d < tol) {
      double prev = tr.step_deltas.size() > 1 ? tr.step_deltas[tr.step_deltas.size() - 2] : 2.0 * d;
      if (forward_residual(c, p) <= 10.0 * tol || !(d < prev) || d == 0.0) {
        fp.iterations = k;
        break;
      }
    }
    if (k == max_iter)
      fail(ErrorKind::MaxIterExceeded, "no convergence after " + std::to_string(max_iter) + " steps", c.kappa(), d);
  }
  fp.kappa = c.kappa();
  fp.config = c;
  fp.residual = forward_residual(c, p);
  if (trace_out) fp.trace = tr;
  if (!(fp.residual <= 10.0 * tol))
    fail(ErrorKind::VerificationFailed, "forward orbit of kappa misses the portrait", fp.kappa, fp.residual);
  return fp;
}

std::vector<std::vector<int>> recover_addresses(const MarkedConfig& c, const Portrait& p) {
  const cplx kappa = c.kappa();
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < p.orbits.size(); ++i) {
    std::vector<int> a;
    for (int j = 0; j < p.orbits[i].length; ++j) {
      int s = p.successor(static_cast<int>(i), j);
      if (s < 0) continue;
      cplx base = std::log(c.positions[i][s] - kappa);
      a.push_back(static_cast<int>(std::lround((c.positions[i][j] - base).imag() / kTwoPi)));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::optional<double>> contraction_diagnostic(const Portrait& p, const MarkedConfig& a,
                                                          const MarkedConfig& b, int n_steps) {
  p.validate();
  if (a.pins.size() != b.pins.size()) fail(ErrorKind::DomainError, "pins must match");
  for (std::size_t k = 0; k < a.pins.size(); ++k) {
    const Pin &x = a.pins[k], &y = b.pins[k];
    if (x.orbit != y.orbit || x.index != y.index || x.value != y.value)
      fail(ErrorKind::DomainError, "pins must match");
    if (a.positions.at(x.orbit).at(x.index) != b.positions.at(y.orbit).at(y.index))
      fail(ErrorKind::DomainError, "pins must match");
  }
  std::vector<std::optional<double>> out;
  MarkedConfig u = a, v = b;
  double d = config_distance(u, v);
  for (int k = 0; k < n_steps; ++k) {
    double dn;
    try {
      u = sigma_step(u, p);
      v = sigma_step(v, p);
      dn = config_distance(u, v);
    } catch (const Error&) {
      break;
    }
    if (!std::isfinite(dn)) break;
    // below this both runs agree to rounding and the ratio is noise
    if (d <= 1e-13)
      out.push_back(std::nullopt);
    else
      out.push_back(dn / d);
    d = dn;
  }
  return out;
}

}  // namespace thk
