// thk: command line front end. One subcommand per process; every artifact
// carries the resolved configuration and seed.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "thk/cli_parse.hpp"
#include "thk/cyl_area.hpp"
#include "thk/dilatation.hpp"
#include "thk/io.hpp"
#include "thk/qc_maps.hpp"
#include "thk/qc_probes.hpp"
#include "thk/spider.hpp"
#include "thk/structure.hpp"
#include "thk/thurston.hpp"

using namespace thk;

namespace {

struct Common {
  std::string family = "exp";
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  long long budget = 200000;
};

struct HypothesisFailed {
  std::string message;
};

void add_common(CLI::App* app, Common& c, bool with_budget) {
  app->add_option("--family", c.family, "exp[:a], cosine[:a,b], sf[:p;q]")->capture_default_str();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--out-dir", c.out_dir, "directory for artifacts")->capture_default_str();
  if (with_budget) app->add_option("--budget", c.budget, "Monte Carlo samples per estimate")->capture_default_str();
}

Json common_echo(const std::string& cmd, const Common& c, const EntireMap& f) {
  return Json{{"command", cmd}, {"family", c.family}, {"family_label", f.label()}, {"seed", c.seed}};
}

std::string path_in(const Common& c, const std::string& name) { return (std::filesystem::path(c.out_dir) / name).string(); }

void write_json(const Common& c, const std::string& name, const Json& j) { write_text(path_in(c, name), j.dump(2) + "\n"); }

void write_csv(const Common& c, const std::string& name, const CsvTable& t, const Json& config) {
  write_text(path_in(c, name), t.render({"config " + config.dump()}));
}

Exclusion disks_of(const std::vector<std::string>& specs) {
  Exclusion D;
  for (const auto& s : specs) D.push_back(parse_disk(s));
  return D;
}

Json disks_json(const Exclusion& D) {
  Json j = Json::array();
  for (const auto& d : D) j.push_back(Json{{"center", to_json(d.center)}, {"radius", num(d.radius)}});
  return j;
}

// ---------------------------------------------------------------------------

struct AreaArgs {
  Common c;
  std::string grid = "e6:e12:7";
  std::vector<std::string> disks{"1"};
  double q = 1.0;
};

Json run_area(const AreaArgs& a) {
  EntireMap f = parse_family(a.c.family);
  auto grid = parse_rho_grid(a.grid);
  Exclusion D = disks_of(a.disks);
  if (!(a.q > 0.0 && a.q <= 1.0)) fail(ErrorKind::InvalidConfig, "q must lie in (0, 1]", {}, a.q);
  Json cfg = common_echo("area", a.c, f);
  cfg["rho_grid"] = a.grid;
  cfg["exclude_disks"] = disks_json(D);
  cfg["q"] = a.q;
  cfg["budget"] = a.c.budget;

  std::vector<std::pair<double, AreaEstimate>> samples;
  CsvTable t;
  t.header = {"rho", "log_rho", "I", "std_error", "tail_bound", "resolution_bound", "n_samples", "convergence_warning"};
  Json est = Json::array();
  for (double rho : grid) {
    AreaEstimate e = aap_integral(f, D, rho, a.q, a.c.seed, a.c.budget);
    samples.emplace_back(rho, e);
    t.add({fmt_num(rho), fmt_num(std::log(rho)), fmt_num(e.value), fmt_num(e.std_error), fmt_num(e.tail_bound),
           fmt_num(e.resolution_bound), std::to_string(e.n_samples), e.convergence_warning ? "1" : "0"});
    Json j = to_json(e);
    j["rho"] = num(rho);
    est.push_back(j);
  }
  Json out{{"config", cfg}, {"estimates", est}};
  PlotSpec p{"cylindrical area of the tract part outside the disk", "rho", "I(rho)", true, true, {}, false};
  PlotSeries pts{"estimate", {}, true};
  for (const auto& [rho, e] : samples) pts.points.emplace_back(rho, e.value);
  p.series.push_back(pts);
  try {
    DegenerationFit fit = fit_degeneration(samples);
    out["fit"] = to_json(fit);
    PlotSeries line{std::string("fit ") + to_string(fit.model) + " exponent " + fmt_num(fit.exponent), {}, false};
    for (double rho : grid) {
      double y = fit.intercept + fit.exponent * std::log(rho);
      if (fit.model == DegenerationModel::LogOverPower) y += std::log(std::log(rho));
      line.points.emplace_back(rho, std::exp(y));
    }
    p.series.push_back(line);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
    out["fit"] = Json{{"error", to_string(e.kind())}, {"message", e.what()}};
  }
  write_csv(a.c, "area.csv", t, cfg);
  write_json(a.c, "area.json", out);
  write_figure(a.c.out_dir, "area_plot", p, cfg);
  Json summary{{"command", "area"}, {"rows", t.rows.size()}};
  if (out["fit"].contains("exponent")) summary["fit_exponent"] = out["fit"]["exponent"];
  return summary;
}

// ---------------------------------------------------------------------------

struct TractArgs {
  Common c;
  std::string rho = "e4";
  int addresses = 2;
  int samples = 257;
};

Json run_tracts(const TractArgs& a) {
  EntireMap f = parse_family(a.c.family);
  double rho = parse_radius(a.rho);
  if (a.addresses < 0 || a.addresses > 50) fail(ErrorKind::InvalidConfig, "addresses must be 0..50", {}, a.addresses);
  Json cfg = common_echo("tracts", a.c, f);
  cfg["rho"] = num(rho);
  cfg["addresses"] = a.addresses;
  cfg["samples"] = a.samples;
  PlotSpec p{"tract boundaries |f| = rho", "Re z", "Im z", false, false, {}, true};
  Json tracts = Json::array();
  for (int c = 0; c < f.tract_count(); ++c)
    for (int s = -a.addresses; s <= a.addresses; ++s) {
      Tract t = tract_boundary(f, rho, s, a.samples, c);
      PlotSeries ser{"c" + std::to_string(c) + " s" + std::to_string(s), {}, false};
      for (cplx z : t.boundary) ser.points.emplace_back(z.real(), z.imag());
      p.series.push_back(ser);
      tracts.push_back(Json{{"component", c}, {"address", s}, {"base_point", to_json(t.base_point)},
                            {"points", t.boundary.size()}});
    }
  write_json(a.c, "tracts.json", Json{{"config", cfg}, {"tracts", tracts}});
  write_figure(a.c.out_dir, "tracts", p, cfg);
  return Json{{"command", "tracts"}, {"curves", tracts.size()}};
}

// ---------------------------------------------------------------------------

struct QcArgs {
  Common c;
  std::string map = "radial-stretch";
  std::string params;
  int grid = 96;
  bool probe = false;
};

QcMap build_map(const std::string& name, const std::vector<double>& v) {
  auto need = [&](std::size_t n) {
    if (v.size() != n)
      fail(ErrorKind::InvalidConfig, name + " takes " + std::to_string(n) + " parameters", {}, static_cast<double>(v.size()));
  };
  if (name == "radial-stretch") {
    need(2);
    return QcMap::radial_stretch(v[0], v[1]);
  }
  if (name == "radial-power") {
    need(3);
    return QcMap::radial_power(v[0], v[1], v[2]);
  }
  if (name == "annulus-twist") {
    need(3);
    return QcMap::annulus_twist(v[0], v[1], v[2]);
  }
  if (name == "push") {
    need(5);
    return QcMap::push_point_in_disk(cplx(v[0], v[1]), cplx(v[2], v[3]), v[4]);
  }
  if (name == "affine") {
    need(4);
    return QcMap::affine(v[0], v[1], v[2], v[3]);
  }
  fail(ErrorKind::InvalidConfig, "unknown map '" + name + "' (known: radial-stretch, radial-power, annulus-twist, push, affine)");
}

std::string default_params(const std::string& name) {
  if (name == "radial-stretch") return "0.5,0.25";
  if (name == "radial-power") return "0.25,1,0.5";
  if (name == "annulus-twist") return "1,0.5,1";
  if (name == "push") return "0,0,0.5,0,1";
  if (name == "affine") return "3,0,0,1";
  return "";
}

Json run_qc(const QcArgs& a) {
  std::string params = a.params.empty() ? default_params(a.map) : a.params;
  QcMap m = build_map(a.map, params.empty() ? std::vector<double>{} : parse_reals(params));
  if (a.grid < 8 || a.grid > 2048) fail(ErrorKind::InvalidConfig, "grid must be 8..2048", {}, a.grid);
  Json cfg{{"command", "qc"}, {"seed", a.c.seed}, {"map", a.map}, {"params", params}, {"grid", a.grid}, {"probe", a.probe}};
  DilatationField d = measure_dilatation([&](cplx z) { return m(z); },
                                         GridSpec::cartesian(-1.5, 1.5, -1.5, 1.5, a.grid, a.grid));
  auto cf = m.closed_form_K();
  Json out{{"config", cfg},
           {"kind", m.kind()},
           {"closed_form_K", cf ? num(*cf) : Json(nullptr)},
           {"K_estimate", num(m.K_estimate())},
           {"measured_sup_D", num(d.sup_D)},
           {"argmax", to_json(d.argmax)},
           {"cylindrical_integral", num(d.cylindrical_integral)},
           {"excluded_cells", d.excluded}};
  if (a.probe) {
    auto rows = distortion_probe({1.0, 0.5, 0.25, 0.125, 0.0});
    CsvTable t;
    t.header = {"kappa", "displacement", "closed_form", "measured_integral"};
    PlotSeries s{"sup cyl displacement", {}, false};
    Json pj = Json::array();
    for (const auto& r : rows) {
      t.add({fmt_num(r.kappa), fmt_num(r.displacement), fmt_num(r.closed_form), fmt_num(r.measured_integral)});
      s.points.emplace_back(r.kappa, r.displacement);
      pj.push_back(Json{{"kappa", num(r.kappa)}, {"displacement", num(r.displacement)}, {"closed_form", num(r.closed_form)}});
    }
    out["probe"] = pj;
    write_csv(a.c, "probe.csv", t, cfg);
    write_figure(a.c.out_dir, "probe_plot", PlotSpec{"distortion probe", "kappa", "displacement", false, false, {s}, false},
                 cfg);
  }
  write_json(a.c, "qc.json", out);
  return Json{{"command", "qc"}, {"kind", m.kind()}, {"measured_sup_D", num(d.sup_D)}, {"closed_form_K", out["closed_form_K"]}};
}

// ---------------------------------------------------------------------------

struct OrbitArgs {
  std::vector<std::string> seeds{"0"};
  int n_iter = 8;
};

void add_orbit(CLI::App* app, OrbitArgs& o) {
  app->add_option("--orbit-seed", o.seeds, "seed of a marked orbit, 'x' or 'x,y'; repeatable")->capture_default_str();
  app->add_option("--n-iter", o.n_iter, "iterates per orbit")->capture_default_str();
}

OrbitSpec orbits_of(const EntireMap& f, const OrbitArgs& o, Json& cfg) {
  std::vector<cplx> seeds;
  for (const auto& s : o.seeds) {
    auto v = parse_reals(s);
    if (v.size() > 2) fail(ErrorKind::InvalidConfig, "orbit seed is 'x' or 'x,y'");
    seeds.emplace_back(v[0], v.size() == 2 ? v[1] : 0.0);
  }
  if (o.n_iter < 0 || o.n_iter > 64) fail(ErrorKind::InvalidConfig, "n-iter must be 0..64", {}, o.n_iter);
  Json sj = Json::array();
  for (cplx s : seeds) sj.push_back(to_json(s));
  cfg["orbit_seeds"] = sj;
  cfg["n_iter"] = o.n_iter;
  return OrbitSpec::forward(f, seeds, o.n_iter);
}

struct SpiderArgs {
  Common c;
  OrbitArgs o;
  std::string rho = "e8";
  double q = 0.1, eps = 0.5;
  int pullbacks = 0;
};

Json run_spider(const SpiderArgs& a) {
  EntireMap f = parse_family(a.c.family);
  Json cfg = common_echo("spider", a.c, f);
  OrbitSpec o = orbits_of(f, a.o, cfg);
  StructureParams p;
  p.rho = parse_radius(a.rho);
  p.q = a.q;
  p.eps = a.eps;
  p.K0 = f.K0();
  if (a.pullbacks < 0 || a.pullbacks > 50) fail(ErrorKind::InvalidConfig, "pullbacks must be 0..50", {}, a.pullbacks);
  cfg["rho"] = num(p.rho);
  cfg["q"] = p.q;
  cfg["eps"] = p.eps;
  cfg["pullbacks"] = a.pullbacks;
  FatSpider s = standard_spider(f, p, o);
  Json gens = Json::array({to_json(s)});
  for (int k = 0; k < a.pullbacks; ++k) {
    s = pull_back_spider(s, f, p, o);
    gens.push_back(to_json(s));
  }
  write_json(a.c, "spider.json", Json{{"config", cfg}, {"generations", gens}});
  PlotSpec pl{"spider legs, generation " + std::to_string(s.generation), "Re z", "Im z", false, false, {}, true};
  PlotSeries circ{"|z| = rho", {}, false};
  for (int k = 0; k <= 256; ++k) {
    cplx z = std::polar(p.rho, kTwoPi * k / 256.0);
    circ.points.emplace_back(z.real(), z.imag());
  }
  pl.series.push_back(circ);
  for (const auto& l : s.legs) {
    PlotSeries ser{"leg a[" + std::to_string(l.orbit) + "][" + std::to_string(l.index) + "]", {}, false};
    for (cplx z : l.path) ser.points.emplace_back(z.real(), z.imag());
    pl.series.push_back(ser);
  }
  write_figure(a.c.out_dir, "spider", pl, cfg);
  return Json{{"command", "spider"}, {"legs", s.legs.size()}, {"generation", s.generation}};
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  Common c;
  OrbitArgs o;
  std::string rho = "auto";
  std::string grid = "e8:e14:7";
  double q = 0.1, eps = 0.5, delta = 1e-3, nu = 40.0;
  std::vector<std::string> disks{"0.5"};
  std::vector<std::string> u_disks{"0.75"};
};

void write_sweep(const CheckArgs& a, const std::vector<RhoSweepRow>& rows, const Json& cfg) {
  CsvTable t;
  t.header = {"rho", "log_rho", "N", "structure_holds", "failed_clauses", "K1", "I_q", "I_q_error", "margin", "envelope"};
  PlotSeries m{"margin", {}, true};
  for (const auto& r : rows) {
    t.add({fmt_num(r.rho), fmt_num(std::log(r.rho)), std::to_string(r.N), r.structure_holds ? "1" : "0", r.failed_clauses,
           fmt_num(r.K1), fmt_num(r.I_q), fmt_num(r.I_q_error), fmt_num(r.margin.margin), fmt_num(r.envelope)});
    m.points.emplace_back(std::log(r.rho), r.margin.margin);
  }
  write_csv(a.c, "sweep.csv", t, cfg);
  write_figure(a.c.out_dir, "margin_plot", PlotSpec{"invariant inequality margin", "log rho", "margin", false, false, {m}, false},
               cfg);
}

Json run_check(const CheckArgs& a) {
  EntireMap f = parse_family(a.c.family);
  Json cfg = common_echo("check", a.c, f);
  OrbitSpec o = orbits_of(f, a.o, cfg);
  SweepOptions so;
  so.q = a.q;
  so.eps = a.eps;
  so.delta = a.delta;
  so.nu = a.nu;
  so.D = disks_of(a.disks);
  so.U = disks_of(a.u_disks);
  so.seed = a.c.seed;
  so.budget = a.c.budget;
  cfg["rho"] = a.rho;
  cfg["q"] = a.q;
  cfg["eps"] = a.eps;
  cfg["delta"] = a.delta;
  cfg["nu"] = a.nu;
  cfg["D"] = disks_json(so.D);
  cfg["U"] = disks_json(so.U);
  cfg["budget"] = a.c.budget;

  std::vector<double> grid;
  if (a.rho == "auto") {
    grid = parse_rho_grid(a.grid);
    cfg["rho_grid"] = a.grid;
  } else {
    grid = {parse_radius(a.rho)};
  }
  std::vector<RhoSweepRow> rows = rho_sweep(f, o, grid, so);
  write_sweep(a, rows, cfg);

  std::optional<std::size_t> pick;
  for (std::size_t k = 0; k < rows.size() && !pick; ++k)
    if (rows[k].structure_holds && rows[k].margin.margin > 0.0) pick = k;
  std::size_t at = pick.value_or(0);
  StructureParams p;
  p.rho = grid[at];
  p.q = a.q;
  p.eps = a.eps;
  SeparatingStructureReport rep = check_separating_structure(f, o, p, so.U, so.structure);
  Json out{{"config", cfg},
           {"admissible", pick.has_value()},
           {"rho", num(grid[at])},
           {"log_rho", num(std::log(grid[at]))},
           {"report", to_json(rep)},
           {"margin", to_json(rows[at].margin)}};
  Json sweep = Json::array();
  for (const auto& r : rows) sweep.push_back(to_json(r));
  out["sweep"] = sweep;
  write_json(a.c, "check.json", out);
  Json summary{{"command", "check"},
               {"admissible", pick.has_value()},
               {"rho", num(grid[at])},
               {"structure_holds", rep.holds()},
               {"margin", num(rows[at].margin.margin)}};
  if (!pick) {
    std::string why = rep.holds() ? "margin is not positive" : "clauses fail:";
    if (!rep.holds())
      for (const auto& v : rep.verdicts)
        if (!v.holds) why += " " + v.clause;
    std::cout << summary.dump() << "\n";
    throw HypothesisFailed{"no admissible rho on the grid: " + why};
  }
  return summary;
}

// ---------------------------------------------------------------------------

struct ThurstonArgs {
  Common c;
  std::string portrait = "misiurewicz-2pi";
  double tol = 1e-9;
  int max_iter = 200;
};

Json run_thurston(const ThurstonArgs& a) {
  Portrait p = Portrait::by_name(a.portrait);
  Json cfg{{"command", "thurston"}, {"seed", a.c.seed}, {"portrait", a.portrait}, {"tol", a.tol}, {"max_iter", a.max_iter}};
  IterationTrace tr;
  auto emit_trace = [&]() {
    CsvTable t;
    t.header = {"step", "delta", "kappa_re", "kappa_im"};
    PlotSeries s{"sup cyl displacement", {}, false};
    for (std::size_t k = 0; k < tr.step_deltas.size(); ++k) {
      cplx kap = tr.parameter_track[k + 1];
      t.add({std::to_string(k + 1), fmt_num(tr.step_deltas[k]), fmt_num(kap.real()), fmt_num(kap.imag())});
      s.points.emplace_back(static_cast<double>(k + 1), tr.step_deltas[k]);
    }
    write_csv(a.c, "convergence.csv", t, cfg);
    write_figure(a.c.out_dir, "convergence_plot",
                 PlotSpec{"pull-back convergence", "step", "displacement", false, true, {s}, false}, cfg);
  };
  FixedPoint fp;
  try {
    fp = solve_fixed_point(p, default_init(p), a.tol, a.max_iter, &tr);
  } catch (const Error&) {
    emit_trace();
    throw;
  }
  emit_trace();
  Json out = to_json(fp);
  write_json(a.c, "thurston.json", Json{{"config", cfg}, {"result", out}});
  return Json{{"command", "thurston"}, {"kappa", to_json(fp.kappa)}, {"iterations", fp.iterations},
              {"residual", num(fp.residual)}};
}

void report_error(const std::string& kind, const std::string& msg, int code) {
  std::cerr << Json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << "\n";
}

// Inserts the entries of a JSON config file as flags right after the
// subcommand, so flags given on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] != "--config") continue;
    if (k + 1 >= args.size()) fail(ErrorKind::InvalidConfig, "--config needs a file");
    std::string file = args[k + 1];
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k) + 2);
    std::ifstream in(file);
    if (!in) fail(ErrorKind::InvalidConfig, "cannot read config " + file);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      fail(ErrorKind::InvalidConfig, std::string("config is not JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
    std::vector<std::string> extra;
    for (const auto& [key, val] : j.items()) {
      auto push = [&](const Json& v) {
        extra.push_back("--" + key);
        extra.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      };
      if (val.is_array())
        for (const auto& v : val) push(v);
      else if (val.is_boolean()) {
        if (val.get<bool>()) extra.push_back("--" + key);
      } else
        push(val);
    }
    if (args.empty()) fail(ErrorKind::InvalidConfig, "--config needs a subcommand");
    args.insert(args.begin() + 1, extra.begin(), extra.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thk: tract areas, quasiconformal tools, spiders, separating structures, pull-back iteration"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  AreaArgs area;
  auto* c_area = app.add_subcommand("area", "cylindrical area sweep and degeneration fit");
  add_common(c_area, area.c, true);
  c_area->add_option("--rho-grid", area.grid, "from:to:n or comma list; 'eX' means exp(X)")->capture_default_str();
  c_area->add_option("--exclude-disk", area.disks, "'R' or 'x,y,R'; repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  c_area->add_option("--q", area.q, "inner radius factor")->capture_default_str();

  TractArgs tr;
  auto* c_tr = app.add_subcommand("tracts", "tract boundary curves");
  add_common(c_tr, tr.c, false);
  c_tr->add_option("--rho", tr.rho, "level |f| = rho")->capture_default_str();
  c_tr->add_option("--addresses", tr.addresses, "addresses -A..A")->capture_default_str();
  c_tr->add_option("--samples", tr.samples, "points per curve")->capture_default_str();

  QcArgs qc;
  auto* c_qc = app.add_subcommand("qc", "explicit quasiconformal maps: closed form against measured dilatation");
  add_common(c_qc, qc.c, false);
  c_qc->add_option("--map", qc.map, "radial-stretch, radial-power, annulus-twist, push, affine")->capture_default_str();
  c_qc->add_option("--params", qc.params, "comma list of map parameters");
  c_qc->add_option("--grid", qc.grid, "cells per side of the measuring grid")->capture_default_str();
  c_qc->add_flag("--probe", qc.probe, "also run the distortion probe");

  SpiderArgs sp;
  auto* c_sp = app.add_subcommand("spider", "standard spider and pull-backs");
  add_common(c_sp, sp.c, false);
  add_orbit(c_sp, sp.o);
  c_sp->add_option("--rho", sp.rho, "spider radius")->capture_default_str();
  c_sp->add_option("--q", sp.q, "inner radius factor")->capture_default_str();
  c_sp->add_option("--eps", sp.eps, "logarithmic collar width, in (0, 1)")->capture_default_str();
  c_sp->add_option("--pullbacks", sp.pullbacks, "number of pull-back steps")->capture_default_str();

  CheckArgs ck;
  auto* c_ck = app.add_subcommand("check", "separating structure verdicts and the invariant inequality");
  add_common(c_ck, ck.c, true);
  add_orbit(c_ck, ck.o);
  c_ck->add_option("--rho", ck.rho, "radius, or 'auto' to search --rho-grid")->capture_default_str();
  c_ck->add_option("--rho-grid", ck.grid, "candidate radii for --rho auto")->capture_default_str();
  c_ck->add_option("--q", ck.q, "inner radius factor")->capture_default_str();
  c_ck->add_option("--eps", ck.eps, "logarithmic collar width, in (0, 1)")->capture_default_str();
  c_ck->add_option("--delta", ck.delta, "threshold Delta of the invariant inequality")->capture_default_str();
  c_ck->add_option("--nu", ck.nu, "exponent base nu of the dilatation term")->capture_default_str();
  c_ck->add_option("--exclude-disk", ck.disks, "area exclusion D; repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  c_ck->add_option("--singular-disk", ck.u_disks, "domain U around the singular values; repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();

  ThurstonArgs th;
  auto* c_th = app.add_subcommand("thurston", "pull-back fixed point for a portrait of e^z + kappa");
  add_common(c_th, th.c, false);
  c_th->add_option("--portrait", th.portrait, "misiurewicz-2pi or escaping-4")->capture_default_str();
  c_th->add_option("--tol", th.tol, "step size at which to stop")->capture_default_str();
  c_th->add_option("--max-iter", th.max_iter, "iteration cap")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("ValidationError", e.what(), 2);
    return 2;
  } catch (const Error& e) {
    report_error(to_string(e.kind()), e.what(), 2);
    return 2;
  }

  try {
    Json summary;
    if (*c_area) summary = run_area(area);
    else if (*c_tr) summary = run_tracts(tr);
    else if (*c_qc) summary = run_qc(qc);
    else if (*c_sp) summary = run_spider(sp);
    else if (*c_ck) summary = run_check(ck);
    else summary = run_thurston(th);
    std::cout << summary.dump() << "\n";
    return 0;
  } catch (const HypothesisFailed& h) {
    report_error("HypothesisFailed", h.message, 4);
    return 4;
  } catch (const Error& e) {
    int code = exit_code_for(e.kind());
    report_error(to_string(e.kind()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what(), 3);
    return 3;
  }
}
