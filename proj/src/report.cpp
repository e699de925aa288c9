#include "sptb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "sptb/analysis.hpp"
#include "sptb/error.hpp"

namespace sptb {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

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
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

const char* kFormatColors[] = {"#4e79a7", "#f28e2b", "#59a14f"};

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "tensor",          "kernel",        "format",     "time_s",     "flops",
      "bytes_model",     "oi",            "gflops",     "bound_gflops", "efficiency",
      "time_median_s",   "time_min_s",    "gflops_mode_avg", "nnz",   "order",
      "modes"};
  return cols;
}

void write_csv(const BenchSuiteResult& result, std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : result.reports) {
    out << csv_field(r.tensor) << ',' << to_string(r.kernel) << ',' << to_string(r.format) << ','
        << num(r.time_s) << ',' << num(r.flops) << ',' << num(r.bytes_model) << ',' << num(r.oi)
        << ',' << num(r.gflops) << ',' << num(r.bound_gflops) << ',' << num(r.efficiency) << ','
        << num(r.time_median_s) << ',' << num(r.time_min_s) << ',' << num(r.gflops_mode_avg)
        << ',' << r.nnz << ',' << r.order << ',' << r.modes_run << "\n";
  }
  for (const auto& f : result.failures) {
    out << "# failed: " << f.tensor << ' ' << to_string(f.kernel) << ' ' << to_string(f.format)
        << ": " << one_line(f.message) << "\n";
  }
  const auto& e = result.environment;
  out << "# environment: workers=" << e.workers
      << " precision=" << (e.precision == Precision::f64 ? "f64" : "f32") << " seed=" << e.seed
      << " platform=" << e.platform.name << " repetitions=" << e.repetitions
      << " timestamp=" << e.timestamp << "\n";
}

void write_svg(const BenchSuiteResult& result, std::ostream& out) {
  const auto& reps = result.reports;

  // Bar chart layout: one group per (tensor, kernel), one bar per format.
  std::vector<std::pair<std::string, Kernel>> groups;
  std::vector<Format> formats;
  for (const auto& r : reps) {
    const std::pair<std::string, Kernel> g{r.tensor, r.kernel};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    if (std::find(formats.begin(), formats.end(), r.format) == formats.end()) {
      formats.push_back(r.format);
    }
  }
  double ymax = 1e-9;
  for (const auto& r : reps) ymax = std::max({ymax, r.gflops, r.bound_gflops});
  ymax *= 1.1;

  const double bar_w = 14;
  const double group_w = bar_w * double(std::max<std::size_t>(formats.size(), 1)) + 16;
  const double left = 70, top = 40, plot_h = 260;
  const double bars_w = std::max(400.0, group_w * double(groups.size()));
  const double width = left + bars_w + 40;
  const double roof_top = top + plot_h + 110;
  const double roof_h = 300, roof_w = 460;
  const double height = roof_top + roof_h + 70;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(std::max(width, left + roof_w + 200))
      << "\" height=\"" << fixed(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << fixed(left) << "\" y=\"20\" font-size=\"14\">GFLOPS by tensor and kernel ("
      << xml_escape(result.environment.platform.name) << ")</text>\n";
  out << "<g class=\"bar-chart\">\n";
  out << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + plot_h) << "\" x2=\""
      << fixed(left + bars_w) << "\" y2=\"" << fixed(top + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left)
      << "\" y2=\"" << fixed(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4;
    const double y = top + plot_h - plot_h * t / 4;
    out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">" << fixed(v, 1) << "</text>\n";
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double gx = left + 8 + group_w * double(gi);
    for (const auto& r : reps) {
      if (r.tensor != groups[gi].first || r.kernel != groups[gi].second) continue;
      const std::size_t fi = static_cast<std::size_t>(
          std::find(formats.begin(), formats.end(), r.format) - formats.begin());
      const double x = gx + bar_w * double(fi);
      const double h = plot_h * r.gflops / ymax;
      const double by = top + plot_h - plot_h * r.bound_gflops / ymax;
      out << "<rect class=\"bar\" x=\"" << fixed(x) << "\" y=\"" << fixed(top + plot_h - h)
          << "\" width=\"" << fixed(bar_w - 2) << "\" height=\"" << fixed(h) << "\" fill=\""
          << kFormatColors[static_cast<int>(r.format)] << "\"><title>" << xml_escape(r.tensor)
          << ' ' << to_string(r.kernel) << ' ' << to_string(r.format) << ": "
          << fixed(r.gflops, 3) << " GFLOPS</title></rect>\n";
      out << "<line class=\"bound-marker\" x1=\"" << fixed(x - 1) << "\" y1=\"" << fixed(by)
          << "\" x2=\"" << fixed(x + bar_w - 1) << "\" y2=\"" << fixed(by)
          << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
    }
    out << "<text x=\"" << fixed(gx) << "\" y=\"" << fixed(top + plot_h + 12)
        << "\" transform=\"rotate(45 " << fixed(gx) << ' ' << fixed(top + plot_h + 12) << ")\">"
        << xml_escape(groups[gi].first) << ' ' << to_string(groups[gi].second) << "</text>\n";
  }
  for (std::size_t fi = 0; fi < formats.size(); ++fi) {
    const double x = left + bars_w - 90;
    const double y = top + 12 * double(fi);
    out << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y - 8) << "\" width=\"10\" height=\"10\" fill=\""
        << kFormatColors[static_cast<int>(formats[fi])] << "\"/><text x=\"" << fixed(x + 14)
        << "\" y=\"" << fixed(y + 1) << "\">" << to_string(formats[fi]) << "</text>\n";
  }
  out << "</g>\n";

  // Roofline chart, log-log.  One marker per (kernel, format): mean OI and
  // mean GFLOPS over tensors.
  std::map<std::pair<Kernel, Format>, std::pair<double, double>> sums;
  std::map<std::pair<Kernel, Format>, int> counts;
  for (const auto& r : reps) {
    auto& s = sums[{r.kernel, r.format}];
    s.first += r.oi;
    s.second += r.gflops;
    ++counts[{r.kernel, r.format}];
  }
  double xmin = 1.0 / 64, xmax = 64, gmin = 1e-3, gmax = 1e4;
  for (const auto& r : reps) {
    if (r.oi > 0) {
      xmin = std::min(xmin, r.oi / 2);
      xmax = std::max(xmax, r.oi * 2);
    }
    if (r.gflops > 0) gmin = std::min(gmin, r.gflops / 2);
    gmax = std::max({gmax, r.gflops * 2, r.bound_gflops * 2});
  }
  gmax = std::max(gmax, result.environment.platform.peak_gflops * 2);
  const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
  const double ly0 = std::log10(gmin), ly1 = std::log10(gmax);
  auto px = [&](double oi) { return left + roof_w * (std::log10(oi) - lx0) / (lx1 - lx0); };
  auto py = [&](double g) { return roof_top + roof_h - roof_h * (std::log10(g) - ly0) / (ly1 - ly0); };

  out << "<g class=\"roofline-chart\">\n";
  out << "<text x=\"" << fixed(left) << "\" y=\"" << fixed(roof_top - 14)
      << "\" font-size=\"14\">Roofline (log-log): GFLOPS vs operational intensity</text>\n";
  out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(roof_top) << "\" width=\"" << fixed(roof_w)
      << "\" height=\"" << fixed(roof_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
    const double x = px(std::pow(10.0, e));
    out << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(roof_top + roof_h + 14)
        << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
    const double y = py(std::pow(10.0, e));
    out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << fixed(left + roof_w / 2) << "\" y=\"" << fixed(roof_top + roof_h + 30)
      << "\" text-anchor=\"middle\">flops/byte</text>\n";

  const RooflinePlatform& plat = result.environment.platform;
  if (plat.peak_gflops > 0 && plat.dram_bandwidth > 0) {
    std::string pts;
    const int steps = 64;
    for (int i = 0; i <= steps; ++i) {
      const double oi = std::pow(10.0, lx0 + (lx1 - lx0) * i / steps);
      const double g = std::clamp(roofline_bound(plat, oi), gmin, gmax);
      pts += fixed(px(oi)) + "," + fixed(py(g)) + " ";
    }
    out << "<polyline class=\"roofline\" points=\"" << pts
        << "\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }

  int idx = 0;
  for (const auto& [key, s] : sums) {
    const int n = counts[key];
    const double oi = s.first / n;
    const double g = std::max(s.second / n, gmin);
    const char* color = kFormatColors[static_cast<int>(key.second)];
    out << "<circle class=\"oi-marker\" data-kernel=\"" << to_string(key.first)
        << "\" data-format=\"" << to_string(key.second) << "\" cx=\"" << fixed(px(oi))
        << "\" cy=\"" << fixed(py(g)) << "\" r=\"5\" fill=\"" << color << "\"><title>"
        << to_string(key.first) << ' ' << to_string(key.second) << ": OI " << fixed(oi, 4)
        << ", " << fixed(s.second / n, 3) << " GFLOPS</title></circle>\n";
    out << "<text x=\"" << fixed(left + roof_w + 12) << "\" y=\"" << fixed(roof_top + 12 + 13 * idx)
        << "\" fill=\"" << color << "\">" << to_string(key.first) << ' ' << to_string(key.second)
        << "</text>\n";
    ++idx;
  }
  out << "</g>\n</svg>\n";
}

void emit_report(const BenchSuiteResult& result, ReportFormat format, const std::string& path) {
  if (result.reports.empty()) throw ConfigError("benchmark result has no reports");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  if (format == ReportFormat::csv) {
    write_csv(result, out);
  } else {
    write_svg(result, out);
  }
  out.flush();
  if (!out) throw Error("write failed for " + path);
}

}  // namespace sptb
