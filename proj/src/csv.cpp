#include "procnet/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace procnet {

int csv_precision() {
  const char* raw = std::getenv(kPrecisionEnv);
  if (raw == nullptr) return 17;
  int value = 0;
  const char* end = raw + std::strlen(raw);
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end || value < 1 || value > 17) return 17;
  return value;
}

std::string format_double(double value, int precision) {
  std::array<char, 64> buffer{};
  std::snprintf(buffer.data(), buffer.size(), "%.*g", precision, value);
  return buffer.data();
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto column : columns) {
    if (!first) out_ << ',';
    out_ << column;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::separator() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  out_ << format_double(value, precision_);
  return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_in_row_ = true;
  ++rows_;
}

}  // namespace procnet
