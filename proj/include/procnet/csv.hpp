#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace procnet {

/// Environment variable that overrides the default number of significant
/// digits (17, enough to round-trip any double).
inline constexpr const char* kPrecisionEnv = "PROCNET_CSV_PRECISION";

int csv_precision();

std::string format_double(double value, int precision);

/// Comma-separated rows with a header line; every line ends in '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out, int precision = csv_precision()) : out_(out), precision_(precision) {}

  void header(std::initializer_list<std::string_view> columns);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(std::string_view value);
  void end_row();

  std::size_t rows() const { return rows_; }

 private:
  void separator();

  std::ostream& out_;
  int precision_;
  bool first_in_row_ = true;
  std::size_t rows_ = 0;
};

}  // namespace procnet
