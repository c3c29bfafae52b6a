#ifndef RAMAT_CSV_HPP
#define RAMAT_CSV_HPP

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace ramat {

// Minimal CSV emitter: header row, RFC-style quoting, '.' decimal separator,
// doubles written with enough digits to round-trip. Optional fields are left
// empty when absent.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);

  CsvWriter& field(double value);
  CsvWriter& field(std::int64_t value);
  CsvWriter& field(std::uint64_t value);
  CsvWriter& field(int value) { return field(static_cast<std::int64_t>(value)); }
  CsvWriter& field(bool value) { return field(static_cast<std::int64_t>(value)); }
  CsvWriter& field(std::string_view value);
  CsvWriter& field(const std::optional<double>& value);
  void end_row();

  static std::string format_double(double value);

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace ramat

#endif  // RAMAT_CSV_HPP
