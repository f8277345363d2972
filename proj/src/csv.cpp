#include "copulakde/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ckde {
namespace csv {

std::string
format_full(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

static std::vector<std::string>
split_line(const std::string& line)
{
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

Table
read_table(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("'" + path + "' is empty");
  Table table;
  table.header = split_line(line);
  const std::size_t n_cols = table.header.size();
  if (n_cols == 0)
    throw std::runtime_error("'" + path + "' has an empty header");

  std::vector<double> values;
  std::size_t n_rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r")
      continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != n_cols) {
      std::ostringstream msg;
      msg << path << ": row " << line_no << " has " << cells.size()
          << " cells, expected " << n_cols;
      throw std::runtime_error(msg.str());
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      const char* begin = cells[c].c_str();
      char* end = nullptr;
      double value = std::strtod(begin, &end);
      while (end && *end == ' ')
        ++end;
      if (end == begin || (end && *end != '\0')) {
        std::ostringstream msg;
        msg << path << ": non-numeric cell '" << cells[c] << "' at row "
            << line_no << ", column " << c + 1;
        throw std::runtime_error(msg.str());
      }
      values.push_back(value);
    }
    ++n_rows;
  }

  table.data.resize(static_cast<Eigen::Index>(n_rows),
                    static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t c = 0; c < n_cols; ++c)
      table.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
        values[r * n_cols + c];
  return table;
}

void
write_table(const std::string& path, const std::vector<std::string>& header,
            const Eigen::MatrixXd& data)
{
  if (static_cast<Eigen::Index>(header.size()) != data.cols())
    throw std::invalid_argument("write_table: header/data column mismatch");
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0)
      out << ',';
    out << header[c];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (c > 0)
        out << ',';
      out << format_full(data(r, c));
    }
    out << '\n';
  }
  if (!out)
    throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace csv
} // namespace ckde
