#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace resrec {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_real(double value);

std::optional<double> parse_real(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace resrec
