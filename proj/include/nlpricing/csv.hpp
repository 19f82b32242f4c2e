#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace nlpricing {

// Numeric cell format used by every emitted table: '%.9g', '.' decimal
// separator, enough digits to check all spec tolerances.
std::string format_g9(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::span<const std::string> names);
  void row(std::span<const double> values);
  // Mixed row: numeric cells formatted, text cells passed through.
  void row_with_tag(std::span<const double> values, const std::string& tag);
  void comment(const std::string& text);  // "# ..." line

 private:
  std::ostream& out_;
};

}  // namespace nlpricing
