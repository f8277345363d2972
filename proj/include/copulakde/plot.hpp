#pragma once

#include "copulakde/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace ckde {
namespace plot {

enum class Kind
{
  surface,
  contour,
  norm_contour
};

Kind kind_from_string(const std::string& name);

//! evaluated plot grid; z(i, j) is the value at (xs(i), ys(j)).
struct Grid
{
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;
  Eigen::MatrixXd z;
};

//! surface/contour evaluate the density over [0.01, 0.99]^2; norm_contour
//! evaluates the density with standard normal margins over [-3, 3]^2.
Grid eval_grid(const FittedCopula& model, Kind kind, Eigen::Index resolution);

using Polyline = std::vector<std::array<double, 2>>;

//! marching-squares level curves with linear edge interpolation, stitched
//! into polylines.
std::vector<Polyline> extract_contours(const Grid& grid, double level);

//! nine levels at {0.1, ..., 0.9} of the grid maximum.
std::vector<double> default_levels(const Grid& grid);

//! standalone SVG 1.1 document: contour polylines with axes and a sorted
//! level legend, or a wireframe perspective rendering for surface plots.
std::string render_svg(const Grid& grid, Kind kind,
                       const std::vector<double>& levels);

//! long-format grid dump (x, y, value), one row per grid node.
std::string grid_csv(const Grid& grid);

} // namespace plot
} // namespace ckde
