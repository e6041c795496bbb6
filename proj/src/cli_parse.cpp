#include "thk/cli_parse.hpp"

#include <cmath>
#include <sstream>

namespace thk {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double real_of(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidConfig, "cannot read " + what + " from '" + s + "'");
  }
  if (used != s.size()) fail(ErrorKind::InvalidConfig, "trailing characters in " + what + " '" + s + "'");
  return v;
}

Poly poly_of(const std::string& s) {
  Poly p;
  for (const auto& c : split(s, ',')) p.push_back(real_of(c, "polynomial coefficient"));
  if (p.empty()) fail(ErrorKind::InvalidConfig, "empty polynomial");
  return p;
}

}  // namespace

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  for (const auto& c : split(s, ',')) out.push_back(real_of(c, "number"));
  if (out.empty()) fail(ErrorKind::InvalidConfig, "empty number list");
  return out;
}

EntireMap parse_family(const std::string& s) {
  auto colon = s.find(':');
  std::string name = s.substr(0, colon), args = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (name == "exp") {
    if (args.empty()) return EntireMap::exponential();
    double a = real_of(args, "exp coefficient");
    if (a == 0.0) fail(ErrorKind::InvalidConfig, "exp coefficient must be nonzero");
    return EntireMap::exponential(a);
  }
  if (name == "cosine") {
    if (args.empty()) return EntireMap::cosine(0.5, 0.5);
    auto v = parse_reals(args);
    if (v.size() != 2) fail(ErrorKind::InvalidConfig, "cosine takes two coefficients a,b");
    if (v[0] == 0.0 || v[1] == 0.0) fail(ErrorKind::InvalidConfig, "cosine coefficients must be nonzero");
    return EntireMap::cosine(v[0], v[1]);
  }
  if (name == "sf") {
    if (args.empty()) return EntireMap::structurally_finite(0.0, {1.0}, {0.0, 1.0});
    auto parts = split(args, ';');
    if (parts.size() != 2) fail(ErrorKind::InvalidConfig, "sf takes 'p0,p1,..;q0,q1,..'");
    return EntireMap::structurally_finite(0.0, poly_of(parts[0]), poly_of(parts[1]));
  }
  fail(ErrorKind::InvalidConfig, "unknown family '" + s + "' (known: exp, cosine, sf)");
}

double parse_radius(const std::string& s) {
  if (s.empty()) fail(ErrorKind::InvalidConfig, "empty radius");
  double r = s[0] == 'e' ? std::exp(real_of(s.substr(1), "radius exponent")) : real_of(s, "radius");
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::InvalidConfig, "radius must be positive and finite", {}, r);
  return r;
}

std::vector<double> parse_rho_grid(const std::string& s) {
  auto parts = split(s, ':');
  std::vector<double> g;
  if (parts.size() == 3) {
    double a = parse_radius(parts[0]), b = parse_radius(parts[1]);
    double nd = real_of(parts[2], "grid size");
    if (nd < 1 || nd != std::floor(nd) || nd > 10000) fail(ErrorKind::InvalidConfig, "grid size must be 1..10000", {}, nd);
    int n = static_cast<int>(nd);
    if (n == 1 && a != b) fail(ErrorKind::InvalidConfig, "a one-point grid needs equal ends");
    for (int k = 0; k < n; ++k) {
      double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      g.push_back(std::exp(std::log(a) + t * (std::log(b) - std::log(a))));
    }
    g.back() = b;
  } else if (parts.size() == 1) {
    for (const auto& c : split(s, ',')) g.push_back(parse_radius(c));
  } else {
    fail(ErrorKind::InvalidConfig, "rho grid must be 'from:to:n' or a comma list");
  }
  for (std::size_t k = 1; k < g.size(); ++k)
    if (!(g[k] > g[k - 1])) fail(ErrorKind::InvalidConfig, "rho grid must be strictly increasing");
  return g;
}

Disk parse_disk(const std::string& s) {
  auto v = parse_reals(s);
  if (v.size() == 1) v = {0.0, 0.0, v[0]};
  if (v.size() != 3) fail(ErrorKind::InvalidConfig, "disk must be 'R' or 'x,y,R'");
  if (!(v[2] > 0.0)) fail(ErrorKind::InvalidConfig, "disk radius must be positive", {}, v[2]);
  return {cplx(v[0], v[1]), v[2]};
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::DomainError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidQuadrilateral:
    case ErrorKind::Unsupported:
    case ErrorKind::DegeneratePath:
      return 2;
    case ErrorKind::RegularityHypothesisFailed:
    case ErrorKind::NotFound:
      return 4;
    default:
      return 3;
  }
}

}  // namespace thk
