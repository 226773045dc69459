#pragma once

#include <string>
#include <vector>

namespace linresp {

// Shortest form that round-trips a double: %.17g.  CSV and JSON artifacts
// must be byte-stable across runs and thread counts, so all floating output
// funnels through here.
std::string fmt17(double x);
std::string fmt17(long double x);  // %.21Lg for the extended pipeline

// Minimal CSV assembly: comma-joined cells, '\n' line ends, no quoting
// (column names and numbers only).
struct CsvBuilder {
  std::string buf;
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return buf; }
};

// Whole-file write/read; throws std::runtime_error naming the path.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace linresp
