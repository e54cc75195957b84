#pragma once

#include <istream>
#include <string>
#include <vector>

namespace evchar {

/// Reads one observation per line: plain text or a single-column CSV.
/// Blank lines and lines starting with '#' are skipped; the first content
/// line may be a non-numeric header. Values may be double-quoted. Anything
/// else raises ParseError naming the offending line.
std::vector<double> read_observations(std::istream& in);
std::vector<double> read_observations_file(const std::string& path);

}  // namespace evchar
