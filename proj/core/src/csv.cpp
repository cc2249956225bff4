#include "degdiff/csv.hpp"

#include <cstdio>
#include <ostream>

namespace degdiff {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_real(v);
    first = false;
  }
  os << '\n';
}

}  // namespace degdiff
