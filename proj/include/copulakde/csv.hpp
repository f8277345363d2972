#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ckde {
namespace csv {

struct Table
{
  std::vector<std::string> header;
  Eigen::MatrixXd data;
};

//! reads a headered numeric CSV; a non-numeric cell raises an error naming
//! its row and column.
Table read_table(const std::string& path);

//! writes a headered CSV with full-precision (17 significant digits) cells.
void write_table(const std::string& path,
                 const std::vector<std::string>& header,
                 const Eigen::MatrixXd& data);

//! shortest round-trip-exact decimal representation ("%.17g").
std::string format_full(double x);

} // namespace csv
} // namespace ckde
