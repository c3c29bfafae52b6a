#include "ramat/csv.hpp"

#include <cstdio>
#include <ostream>

namespace ramat {

std::string CsvWriter::format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (auto name : names) field(name);
  end_row();
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view value) {
  separator();
  const bool needs_quotes =
      value.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) {
    out_ << value;
    return *this;
  }
  out_ << '"';
  for (char c : value) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

CsvWriter& CsvWriter::field(const std::optional<double>& value) {
  if (value) return field(*value);
  separator();
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace ramat
