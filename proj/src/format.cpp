#include "discoscore/format.hpp"

#include <cmath>
#include <cstdio>

namespace discoscore {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : "NA";
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace discoscore
