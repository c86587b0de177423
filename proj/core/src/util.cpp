#include "crossover/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>

#include "crossover/errors.hpp"

namespace crossover {

std::string_view trim(std::string_view text) noexcept {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", lineno);
    const auto key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", lineno);
    out[std::string(key)] = {std::string(trim(body.substr(eq + 1))), lineno};
  }
  return out;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) return v;
  // Accept exact scientific notation such as 2e4.
  const double d = parse_double(text);
  if (d >= 0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  throw ParseError("not a nonnegative integer: '" + std::string(text) + "'");
}

double parse_double(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw ParseError("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ParseError("not a number: '" + s + "'");
  return v;
}

bool parse_bool(std::string_view text) {
  const auto t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ParseError("not a boolean: '" + std::string(t) + "'");
}

std::pair<std::size_t, std::size_t> parse_range(std::string_view text) {
  text = trim(text);
  auto sep = text.find(',');
  if (sep == std::string_view::npos) sep = text.find('-');
  if (sep == std::string_view::npos) throw ParseError("expected 'lo,hi': '" + std::string(text) + "'");
  const auto lo = parse_u64(text.substr(0, sep));
  const auto hi = parse_u64(text.substr(sep + 1));
  if (lo > hi) throw ParseError("range lower bound exceeds upper bound");
  return {lo, hi};
}

std::vector<std::uint64_t> parse_u64_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  text = trim(text);
  while (!text.empty()) {
    const auto sep = text.find(',');
    out.push_back(parse_u64(text.substr(0, sep)));
    if (sep == std::string_view::npos) break;
    text = text.substr(sep + 1);
  }
  return out;
}

std::string format_real(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

}  // namespace crossover
