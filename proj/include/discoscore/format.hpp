#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace discoscore {

// Fixed six-decimal rendering used by every report; "nan" for NaN and
// negative zero printed as zero, so outputs are byte-stable.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view field);

}  // namespace discoscore
