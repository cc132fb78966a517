#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace techmap::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_alnum(char c) noexcept;
bool is_upper(char c) noexcept;
bool is_lower(char c) noexcept;

/// 17 significant digits in general notation; parses back bit-exact.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

} // namespace techmap::text
