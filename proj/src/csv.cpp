#include "nlpricing/csv.hpp"

#include <cstdio>

namespace nlpricing {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void CsvWriter::header(std::span<const std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_g9(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row_with_tag(std::span<const double> values,
                             const std::string& tag) {
  for (const double v : values) out_ << format_g9(v) << ',';
  out_ << tag << '\n';
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << '\n'; }

}  // namespace nlpricing
