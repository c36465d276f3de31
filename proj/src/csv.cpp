#include "tailrobust/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "tailrobust/format.hpp"

namespace tailrobust {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(trim(f));
      table.columns.resize(table.header.size());
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto f = trim(fields[i]);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
        throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad number '" +
                                    std::string(f) + "'");
      }
      table.columns[i].push_back(value);
    }
  }
  if (table.header.empty()) throw std::invalid_argument("csv input is empty (header required)");
  return table;
}

BivariateSample sample_from_table(const CsvTable& table) {
  const int xi = table.column_index("x");
  const int yi = table.column_index("y");
  if (xi < 0 || yi < 0) throw std::invalid_argument("csv input needs columns x and y");
  BivariateSample sample;
  const auto& xs = table.columns[static_cast<std::size_t>(xi)];
  const auto& ys = table.columns[static_cast<std::size_t>(yi)];
  sample.pairs.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sample.pairs.push_back({xs[i], ys[i]});
  sample.validate();
  return sample;
}

void write_sample_csv(std::ostream& out, const BivariateSample& sample) {
  out << "x,y\n";
  for (const auto& p : sample.pairs) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void write_column_csv(std::ostream& out, const std::string& name, std::span<const double> values) {
  out << name << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

}  // namespace tailrobust
