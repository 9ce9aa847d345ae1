#pragma once

#include <string>
#include <string_view>

namespace orl {

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);

/// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace orl
