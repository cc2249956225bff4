#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>

namespace degdiff {

/// Shortest round-trip-safe rendering (17 significant digits).
std::string format_real(double v);

void write_csv_row(std::ostream& os, std::initializer_list<double> values);

}  // namespace degdiff
