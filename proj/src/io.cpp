#include "evchar/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <string_view>

#include <fmt/core.h>

#include "evchar/error.hpp"

namespace evchar {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = trim(s.substr(1, s.size() - 2));
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

}  // namespace

std::vector<double> read_observations(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.find(',') != std::string_view::npos)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: expected a single column, got '{}'", line_no, s));
    const std::optional<double> v = parse_number(s);
    if (!v) {
      if (!seen_content) {  // header
        seen_content = true;
        continue;
      }
      throw Error(ErrorCode::ParseError, fmt::format("line {}: cannot parse '{}' as a number", line_no, s));
    }
    seen_content = true;
    out.push_back(*v);
  }
  if (in.bad()) throw Error(ErrorCode::IoError, fmt::format("read failure after line {}", line_no));
  return out;
}

std::vector<double> read_observations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  try {
    return read_observations(in);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
    throw;
  }
}

}  // namespace evchar
