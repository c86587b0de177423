#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crossover {

// key -> (value, 1-based line). Blank lines and lines starting with '#' are
// skipped; whitespace around key and value is trimmed. Later keys win.
using KeyValues = std::map<std::string, std::pair<std::string, std::size_t>>;
KeyValues parse_key_values(std::istream& in);

std::uint64_t parse_u64(std::string_view text);
double parse_double(std::string_view text);
bool parse_bool(std::string_view text);
// "lo,hi" (or "lo-hi") with lo <= hi.
std::pair<std::size_t, std::size_t> parse_range(std::string_view text);
std::vector<std::uint64_t> parse_u64_list(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

// printf-style %.{digits}g, so output is locale-independent and reproducible.
std::string format_real(double value, int digits = 6);

}  // namespace crossover
