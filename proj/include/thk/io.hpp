#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "thk/core.hpp"
#include "thk/cyl_area.hpp"
#include "thk/spider.hpp"
#include "thk/structure.hpp"
#include "thk/thurston.hpp"

namespace thk {

using Json = nlohmann::ordered_json;

// Shortest decimal that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string fmt_num(double x);

Json to_json(cplx z);  // [re, im]
Json to_json(const AreaEstimate& e);
Json to_json(const DegenerationFit& f);
Json to_json(const InvariantMargin& m);
Json to_json(const SeparatingStructureReport& r);
Json to_json(const RhoSweepRow& r);
Json to_json(const KLedger& l);
Json to_json(const FatSpider& s);
Json to_json(const FixedPoint& fp);
// Non-finite doubles become strings so the output stays valid JSON.
Json num(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string render(const std::vector<std::string>& comments = {}) const;  // comments as leading "# " lines
};

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool markers = false;  // markers instead of a connected line
};

struct PlotSpec {
  std::string title;
  std::string xlabel, ylabel;
  bool logx = false, logy = false;  // base-10 axes; non-positive values are dropped
  std::vector<PlotSeries> series;
  bool equal_aspect = false;
};

std::string render_svg(const PlotSpec& p, const std::string& desc = {});
// The plotted numbers: one row per point, with the series name.
CsvTable plot_table(const PlotSpec& p);

void write_text(const std::string& path, const std::string& text);
// stem.svg plus its twin stem.csv, both carrying the config echo.
void write_figure(const std::string& dir, const std::string& stem, const PlotSpec& p, const Json& config);

}  // namespace thk
