#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "thk/io.hpp"

using namespace thk;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("numbers round-trip through their text") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-300.0, 300.0);
  for (int k = 0; k < 1000; ++k) {
    double x = std::pow(10.0, U(rng)) * (k % 2 ? 1.0 : -1.0);
    CHECK(std::stod(fmt_num(x)) == x);
  }
  CHECK(fmt_num(0.5) == "0.5");
  CHECK(fmt_num(std::nan("")) == "nan");
  CHECK(fmt_num(-INFINITY) == "-inf");
  CHECK(num(INFINITY) == Json("inf"));
  CHECK(to_json(cplx(1.5, -2.0)).dump() == "[1.5,-2.0]");
}

TEST_CASE("csv quoting and comments") {
  CsvTable t;
  t.header = {"a", "b"};
  t.add({"1", "x,y"});
  t.add({"2", "say \"hi\""});
  CHECK(t.render({"seed 7"}) == "# seed 7\na,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
  CHECK_THROWS_AS(t.add({"only one"}), Error);
}

TEST_CASE("svg draws every usable point and its twin lists them") {
  PlotSpec p;
  p.title = "I vs rho";
  p.logx = p.logy = true;
  PlotSeries s{"estimate", {}, true};
  for (int k = 6; k <= 12; ++k) s.points.emplace_back(std::exp(k), 2.0 * k * std::exp(-k));
  p.series.push_back(s);
  p.series.push_back({"drop", {{-1.0, 1.0}, {1.0, 0.0}, {10.0, 5.0}}, false});
  std::string svg = render_svg(p, "config {\"seed\":1}");
  CHECK(count(svg, "<circle") == 7);
  CHECK(count(svg, "<polyline") == 1);  // the single usable point of "drop"
  CHECK(svg.find("&quot;seed&quot;") != std::string::npos);
  CHECK(svg == render_svg(p, "config {\"seed\":1}"));

  CsvTable t = plot_table(p);
  CHECK(t.rows.size() == 10);  // the twin keeps the raw numbers, dropped ones included
  CHECK(t.rows[0][0] == "estimate");
  CHECK(std::stod(t.rows[0][1]) == std::exp(6.0));
}

TEST_CASE("svg handles degenerate ranges") {
  PlotSpec p;
  p.series.push_back({"flat", {{1.0, 2.0}, {2.0, 2.0}}, false});
  std::string svg = render_svg(p);
  CHECK(svg.find("nan") == std::string::npos);
  PlotSpec empty;
  CHECK(render_svg(empty).find("</svg>") != std::string::npos);
}

TEST_CASE("report serialisation keeps non-finite values") {
  InvariantMargin m;
  m.margin = -INFINITY;
  Json j = to_json(m);
  CHECK(j["margin"] == "-inf");
  CHECK(j.dump().find("null") == std::string::npos);
}
