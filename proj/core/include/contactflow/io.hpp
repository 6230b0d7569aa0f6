#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace contactflow::io {

// Shortest round-trip decimal form (std::to_chars); "-0" is normalized to
// "0". Deterministic and locale-independent, so identical runs produce
// byte-identical files.
std::string format_double(double v);

using Row = std::vector<std::string>;

// Emits "# <config_comment>", a header line with the column names, then one
// comma-joined line per row. Cells must be plain tokens (no commas/quotes).
void write_csv(std::ostream& os, const std::string& config_comment,
               const std::vector<std::string>& columns, const std::vector<Row>& rows);
void write_csv_file(const std::string& path, const std::string& config_comment,
                    const std::vector<std::string>& columns, const std::vector<Row>& rows);

void write_text_file(const std::string& path, const std::string& content);

// Plain-text key=value configuration: blank lines and lines starting with
// '#' are skipped; whitespace around keys/values is trimmed; a repeated key
// keeps the last value. Throws std::runtime_error on unreadable files or
// lines without '='.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Self-contained SVG line plot (no external dependencies). Points with
// non-finite coordinates — or non-positive ones on a log-scaled axis — are
// dropped.
struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series,
                     bool logx = false, bool logy = false);

}  // namespace contactflow::io
