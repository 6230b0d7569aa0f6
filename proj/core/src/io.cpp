#include "contactflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace contactflow::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const std::string& config_comment,
               const std::vector<std::string>& columns, const std::vector<Row>& rows) {
  os << "# " << config_comment << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os << ',';
    os << columns[i];
  }
  os << "\n";
  for (const Row& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << "\n";
  }
}

void write_csv_file(const std::string& path, const std::string& config_comment,
                    const std::vector<std::string>& columns, const std::vector<Row>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(os, config_comment, columns, rows);
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value, got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    }
    out[key] = value;
  }
  return out;
}

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series, bool logx,
                     bool logy) {
  constexpr double kW = 800, kH = 560;
  constexpr double kL = 80, kR = 30, kT = 50, kB = 60;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

  // Collect transformed points per series.
  struct Pt {
    double x, y;
  };
  std::vector<std::vector<Pt>> pts(series.size());
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::size_t n = std::min(series[s].x.size(), series[s].y.size());
    for (std::size_t i = 0; i < n; ++i) {
      double px = series[s].x[i];
      double py = series[s].y[i];
      if (!std::isfinite(px) || !std::isfinite(py)) continue;
      if (logx) {
        if (!(px > 0)) continue;
        px = std::log10(px);
      }
      if (logy) {
        if (!(py > 0)) continue;
        py = std::log10(py);
      }
      pts[s].push_back({px, py});
      if (!any) {
        xmin = xmax = px;
        ymin = ymax = py;
        any = true;
      } else {
        xmin = std::min(xmin, px);
        xmax = std::max(xmax, px);
        ymin = std::min(ymin, py);
        ymax = std::max(ymax, py);
      }
    }
  }
  if (!any) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax - xmin < 1e-300) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-300) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double padx = 0.04 * (xmax - xmin);
  const double pady = 0.06 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  auto sx = [&](double v) { return kL + (v - xmin) / (xmax - xmin) * (kW - kL - kR); };
  auto sy = [&](double v) { return kH - kB - (v - ymin) / (ymax - ymin) * (kH - kT - kB); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  os << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
        "font-family=\"sans-serif\">"
     << xml_escape(title) << "</text>\n";

  // Axes and ticks.
  os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\""
     << kH - kT - kB << "\" fill=\"none\" stroke=\"black\"/>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / kTicks;
    const double fy = ymin + (ymax - ymin) * i / kTicks;
    const double px = sx(fx);
    const double py = sy(fy);
    os << "<line x1=\"" << px << "\" y1=\"" << kH - kB << "\" x2=\"" << px << "\" y2=\""
       << kH - kB + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px << "\" y=\"" << kH - kB + 20
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
       << format_tick(logx ? std::pow(10.0, fx) : fx) << "</text>\n";
    os << "<line x1=\"" << kL - 5 << "\" y1=\"" << py << "\" x2=\"" << kL << "\" y2=\"" << py
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kL - 8 << "\" y=\"" << py + 4
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">"
       << format_tick(logy ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 15
     << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
     << xml_escape(xlabel) << (logx ? " (log)" : "") << "</text>\n";
  os << "<text x=\"20\" y=\"" << (kT + kH - kB) / 2
     << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" transform=\"rotate(-90 "
        "20 "
     << (kT + kH - kB) / 2 << ")\">" << xml_escape(ylabel) << (logy ? " (log)" : "")
     << "</text>\n";

  // Data.
  for (std::size_t s = 0; s < pts.size(); ++s) {
    const char* color = kColors[s % 8];
    if (pts[s].size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const Pt& p : pts[s]) os << sx(p.x) << ',' << sy(p.y) << ' ';
      os << "\"/>\n";
    }
    for (const Pt& p : pts[s]) {
      os << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"2.5\" fill=\"" << color
         << "\"/>\n";
    }
    os << "<text x=\"" << kW - kR - 10 << "\" y=\"" << kT + 18 + 16 * s
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color
       << "\">" << xml_escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace contactflow::io
