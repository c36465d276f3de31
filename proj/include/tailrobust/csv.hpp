#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tailrobust/copulas.hpp"

namespace tailrobust {

// Numeric CSV: mandatory header row, comma separated, '.' decimal point.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  // Index of `name` in the header, or -1.
  int column_index(const std::string& name) const;
};

// Throws std::invalid_argument on ragged rows or unparsable numbers, naming
// the offending line.
CsvTable read_csv(std::istream& in);

// Requires columns x and y.
BivariateSample sample_from_table(const CsvTable& table);

// Header `x,y`, shortest round-trip decimals, LF line endings.
void write_sample_csv(std::ostream& out, const BivariateSample& sample);

void write_column_csv(std::ostream& out, const std::string& name, std::span<const double> values);

}  // namespace tailrobust
