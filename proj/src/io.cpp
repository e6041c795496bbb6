#include "thk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace thk {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt_num(x);
}

Json to_json(cplx z) { return Json::array({num(z.real()), num(z.imag())}); }

Json to_json(const AreaEstimate& e) {
  return Json{{"value", num(e.value)},
              {"std_error", num(e.std_error)},
              {"tail_bound", num(e.tail_bound)},
              {"resolution_bound", num(e.resolution_bound)},
              {"n_samples", e.n_samples},
              {"evaluations", e.evaluations},
              {"seed", e.seed},
              {"w_max", num(e.w_max)},
              {"convergence_warning", e.convergence_warning},
              {"tail_added", e.tail_added},
              {"tail_model", to_string(e.tail_model)}};
}

Json to_json(const DegenerationFit& f) {
  Json s = Json::array();
  for (const auto& [rho, I] : f.samples) s.push_back(Json::array({num(rho), num(I)}));
  return Json{{"model", to_string(f.model)},
              {"exponent", num(f.exponent)},
              {"intercept", num(f.intercept)},
              {"r2", num(f.r2)},
              {"samples", s}};
}

Json to_json(const InvariantMargin& m) {
  return Json{{"margin", num(m.margin)},
              {"overflow", m.overflow},
              {"exact_zero_area", m.exact_zero_area},
              {"ln_area", num(m.ln_area)},
              {"ln_dilatation_term", num(m.ln_dilatation_term)}};
}

Json to_json(const SeparatingStructureReport& r) {
  Json v = Json::array();
  for (const auto& c : r.verdicts) v.push_back(Json{{"clause", c.clause}, {"holds", c.holds}, {"witness", c.witness}});
  return Json{{"holds", r.holds()},
              {"params",
               {{"rho", num(r.params.rho)},
                {"q", num(r.params.q)},
                {"eps", num(r.params.eps)},
                {"K0", num(r.params.K0)},
                {"K1", num(r.params.K1)}}},
              {"N_rho", r.N_rho},
              {"K1_source", to_string(r.k1_source)},
              {"K1_bound", num(r.K1_bound)},
              {"regularity_shifts", r.regularity_shifts},
              {"ln_max_omega_product", num(r.ln_max_omega_product)},
              {"omega_truncation_exact", r.omega_truncation_exact},
              {"verdicts", v}};
}

Json to_json(const RhoSweepRow& r) {
  return Json{{"rho", num(r.rho)},
              {"log_rho", num(std::log(r.rho))},
              {"N", r.N},
              {"structure_holds", r.structure_holds},
              {"failed_clauses", r.failed_clauses},
              {"K1", num(r.K1)},
              {"I_q", num(r.I_q)},
              {"I_q_error", num(r.I_q_error)},
              {"margin", to_json(r.margin)},
              {"envelope", num(r.envelope)}};
}

Json to_json(const KLedger& l) {
  return Json{{"ln_base", num(l.base.ln())},
              {"exponent_power", l.exponent_power},
              {"ln_omega_factor", num(l.omega_factor.ln())},
              {"beta", num(l.beta)},
              {"ln_bound", num(l.bound().ln())},
              {"decomposable", l.decomposable}};
}

Json to_json(const FatSpider& s) {
  Json legs = Json::array();
  for (const auto& l : s.legs) {
    Json path = Json::array();
    for (cplx z : l.path) path.push_back(to_json(z));
    legs.push_back(Json{{"orbit", l.orbit},
                        {"index", l.index},
                        {"foot", to_json(l.foot)},
                        {"word", l.word},
                        {"prolongation", to_string(l.how)},
                        {"shift_K", num(l.shift_K)},
                        {"ledger", to_json(l.ledger)},
                        {"path", path}});
  }
  Json removed = Json::array();
  for (cplx z : s.removed) removed.push_back(to_json(z));
  return Json{{"generation", s.generation},
              {"inner_radius", num(s.inner_radius)},
              {"outer_radius", num(s.outer_radius)},
              {"removed", removed},
              {"legs", legs}};
}

Json to_json(const FixedPoint& fp) {
  Json pos = Json::array();
  for (const auto& orb : fp.config.positions) {
    Json o = Json::array();
    for (cplx z : orb) o.push_back(to_json(z));
    pos.push_back(o);
  }
  Json warn = Json::array();
  for (const auto& w : fp.trace.warnings)
    warn.push_back(Json{{"step", w.step}, {"orbit", w.orbit}, {"index", w.index}, {"jump", num(w.jump)}});
  Json deltas = Json::array();
  for (double d : fp.trace.step_deltas) deltas.push_back(num(d));
  Json track = Json::array();
  for (cplx k : fp.trace.parameter_track) track.push_back(to_json(k));
  return Json{{"kappa", to_json(fp.kappa)},
              {"iterations", fp.iterations},
              {"residual", num(fp.residual)},
              {"positions", pos},
              {"addresses", fp.config.addresses},
              {"step_deltas", deltas},
              {"parameter_track", track},
              {"branch_warnings", warn}};
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) fail(ErrorKind::DomainError, "csv row width differs from header", {}, row.size());
  rows.push_back(std::move(row));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double map(double v) const { return log ? std::log10(v) : v; }
};

// roughly five ticks at 1, 2, 5 times a power of ten
std::vector<double> linear_ticks(double lo, double hi) {
  double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  double raw = span / 5.0, mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

}  // namespace

std::string CsvTable::render(const std::vector<std::string>& comments) const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) out += (k ? "," : "") + csv_field(r[k]);
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

CsvTable plot_table(const PlotSpec& p) {
  CsvTable t;
  t.header = {"series", "x", "y"};
  for (const auto& s : p.series)
    for (const auto& [x, y] : s.points) t.add({s.name, fmt_num(x), fmt_num(y)});
  return t;
}

std::string render_svg(const PlotSpec& p, const std::string& desc) {
  const double W = 640, H = 440, ml = 70, mr = 20, mt = 40, mb = 60;
  Axis ax{0, 1, p.logx}, ay{0, 1, p.logy};
  bool any = false;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!p.logx || x > 0.0) && (!p.logy || y > 0.0);
  };
  for (const auto& s : p.series)
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      double u = ax.map(x), v = ay.map(y);
      if (!any) {
        x0 = x1 = u;
        y0 = y1 = v;
        any = true;
      }
      x0 = std::min(x0, u);
      x1 = std::max(x1, u);
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  auto pad = [](double& lo, double& hi) {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  };
  pad(x0, x1);
  pad(y0, y1);
  double pw = W - ml - mr, ph = H - mt - mb;
  if (p.equal_aspect) {
    // same units per pixel on both axes
    double sx = (x1 - x0) / pw, sy = (y1 - y0) / ph;
    if (sx > sy) {
      double c = 0.5 * (y0 + y1);
      y0 = c - 0.5 * sx * ph;
      y1 = c + 0.5 * sx * ph;
    } else {
      double c = 0.5 * (x0 + x1);
      x0 = c - 0.5 * sy * pw;
      x1 = c + 0.5 * sy * pw;
    }
  }
  auto X = [&](double u) { return ml + (u - x0) / (x1 - x0) * pw; };
  auto Y = [&](double v) { return mt + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!desc.empty()) o << "<desc>" << xml_escape(desc) << "</desc>\n";
  o << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed2(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(p.title)
    << "</text>\n";
  o << "<rect x=\"" << fixed2(ml) << "\" y=\"" << fixed2(mt) << "\" width=\"" << fixed2(pw) << "\" height=\""
    << fixed2(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  auto ticks = [&](double lo, double hi, bool log) {
    std::vector<std::pair<double, std::string>> out;
    if (log) {
      std::vector<double> t;
      for (double e = std::ceil(lo); e <= hi; e += 1.0) t.push_back(e);
      if (t.size() >= 2) {
        for (double e : t) out.emplace_back(e, "1e" + std::to_string(static_cast<int>(e)));
        return out;
      }
      for (double v : linear_ticks(lo, hi)) out.emplace_back(v, tick_label(std::pow(10.0, v)));
      return out;
    }
    for (double v : linear_ticks(lo, hi)) out.emplace_back(v, tick_label(v));
    return out;
  };
  for (const auto& [u, label] : ticks(x0, x1, p.logx)) {
    o << "<line x1=\"" << fixed2(X(u)) << "\" y1=\"" << fixed2(mt + ph) << "\" x2=\"" << fixed2(X(u)) << "\" y2=\""
      << fixed2(mt + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed2(X(u)) << "\" y=\"" << fixed2(mt + ph + 18) << "\" text-anchor=\"middle\">"
      << xml_escape(label) << "</text>\n";
  }
  for (const auto& [v, label] : ticks(y0, y1, p.logy)) {
    o << "<line x1=\"" << fixed2(ml - 5) << "\" y1=\"" << fixed2(Y(v)) << "\" x2=\"" << fixed2(ml) << "\" y2=\""
      << fixed2(Y(v)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed2(ml - 8) << "\" y=\"" << fixed2(Y(v) + 4) << "\" text-anchor=\"end\">"
      << xml_escape(label) << "</text>\n";
  }
  o << "<text x=\"" << fixed2(ml + pw / 2) << "\" y=\"" << fixed2(H - 15) << "\" text-anchor=\"middle\">"
    << xml_escape(p.xlabel) << "</text>\n";
  o << "<text x=\"15\" y=\"" << fixed2(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << fixed2(mt + ph / 2) << ")\">" << xml_escape(p.ylabel) << "</text>\n";

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* col = palette[k % 7];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      if (s.markers) {
        o << "<circle cx=\"" << fixed2(X(ax.map(x))) << "\" cy=\"" << fixed2(Y(ay.map(y))) << "\" r=\"3\" fill=\""
          << col << "\"/>\n";
      } else {
        pts += (pts.empty() ? "" : " ") + fixed2(X(ax.map(x))) + "," + fixed2(Y(ay.map(y)));
      }
    }
    if (!pts.empty())
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    o << "<text x=\"" << fixed2(ml + 10) << "\" y=\"" << fixed2(mt + 16 + 14.0 * k) << "\" fill=\"" << col << "\">"
      << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::filesystem::path pth(path);
  if (pth.has_parent_path()) std::filesystem::create_directories(pth.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidConfig, "cannot write " + path);
  f << text;
  if (!f) fail(ErrorKind::InvalidConfig, "write failed for " + path);
}

void write_figure(const std::string& dir, const std::string& stem, const PlotSpec& p, const Json& config) {
  std::string echo = config.dump();
  std::filesystem::path base = std::filesystem::path(dir) / stem;
  write_text(base.string() + ".svg", render_svg(p, "config " + echo));
  write_text(base.string() + ".csv", plot_table(p).render({"config " + echo}));
}

}  // namespace thk
