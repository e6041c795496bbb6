#include "thk/orbits.hpp"

#include <cmath>
#include <optional>

namespace thk {

OrbitSpec OrbitSpec::explicit_orbits(std::vector<Polyline> orbits, std::vector<std::vector<int>> omegas) {
  OrbitSpec o;
  o.source = Source::Explicit;
  o.orbits = std::move(orbits);
  o.omegas = std::move(omegas);
  o.truncated_at.assign(o.orbits.size(), -1);
  for (const auto& w : o.omegas)
    for (int d : w)
      if (d < 1) fail(ErrorKind::DomainError, "local degrees must be at least 1", {}, d);
  return o;
}

std::vector<cplx> forward_orbit(const EntireMap& f, cplx seed, int n, int* truncated_at) {
  if (truncated_at) *truncated_at = -1;
  std::vector<cplx> out;
  if (n < 0) return out;
  out.push_back(seed);
  cplx z = seed;
  for (int k = 1; k <= n; ++k) {
    try {
      z = f.eval(z);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RangeOverflow) throw;
      if (truncated_at) *truncated_at = k;
      break;
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      if (truncated_at) *truncated_at = k;
      break;
    }
    out.push_back(z);
  }
  return out;
}

OrbitSpec OrbitSpec::forward(const EntireMap& f, const std::vector<cplx>& seeds, int n) {
  OrbitSpec o;
  o.source = Source::Forward;
  // captured points replace the free iterate at their position
  auto override_at = [&](std::size_t i, int j) -> std::optional<cplx> {
    if (!f.capture()) return std::nullopt;
    for (const auto& ov : f.capture()->overrides)
      if (ov.orbit == static_cast<int>(i) && ov.index == j) return ov.position;
    return std::nullopt;
  };
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    int cut = -1;
    Polyline orb;
    cplx z = override_at(i, 0).value_or(seeds[i]);
    for (int j = 0; j <= n; ++j) {
      if (j > 0) {
        if (auto ov = override_at(i, j)) {
          z = *ov;
        } else {
          try {
            z = f.eval(z);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::RangeOverflow) throw;
            cut = j;
            break;
          }
          if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            cut = j;
            break;
          }
        }
      }
      orb.push_back(z);
    }
    std::vector<int> w;
    for (cplx a : orb) {
      int d = 1;
      try {
        d = f.local_degree(a);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::RangeOverflow) throw;  // far out the derivative is huge, so a is regular
      }
      w.push_back(d);
    }
    o.orbits.push_back(std::move(orb));
    o.omegas.push_back(std::move(w));
    o.truncated_at.push_back(cut);
  }
  return o;
}

int OrbitSpec::omega(std::size_t i, std::size_t j) const {
  if (i < omegas.size() && j < omegas[i].size()) return omegas[i][j];
  return 1;
}

int count_inside(const OrbitSpec& o, std::size_t i, double rho) {
  int n = 0;
  for (cplx z : o.orbits.at(i))
    if (std::abs(z) < rho) ++n;
  return n;
}

int count_inside(const OrbitSpec& o, double rho) {
  int n = 0;
  for (std::size_t i = 0; i < o.size(); ++i) n += count_inside(o, i, rho);
  return n;
}

}  // namespace thk
