#include "copulakde/plot.hpp"

#include "copulakde/csv.hpp"
#include "copulakde/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ckde {
namespace plot {

Kind
kind_from_string(const std::string& name)
{
  std::string s;
  for (char c : name)
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "surface")
    return Kind::surface;
  if (s == "contour")
    return Kind::contour;
  if (s == "norm_contour" || s == "norm-contour")
    return Kind::norm_contour;
  throw std::invalid_argument(
    "unknown plot kind '" + name +
    "' (expected surface, contour, norm-contour)");
}

Grid
eval_grid(const FittedCopula& model, Kind kind, Eigen::Index resolution)
{
  if (resolution < 2)
    throw std::invalid_argument("eval_grid: resolution must be at least 2");
  Grid grid;
  if (kind == Kind::norm_contour) {
    grid.xs = Eigen::VectorXd::LinSpaced(resolution, -3.0, 3.0);
    grid.ys = grid.xs;
    grid.z.resize(resolution, resolution);
    for (Eigen::Index i = 0; i < resolution; ++i) {
      double u = stats::pnorm(grid.xs(i));
      double fx = stats::dnorm(grid.xs(i));
      for (Eigen::Index j = 0; j < resolution; ++j) {
        double v = stats::pnorm(grid.ys(j));
        grid.z(i, j) = model.pdf(u, v) * fx * stats::dnorm(grid.ys(j));
      }
    }
  } else {
    grid.xs = Eigen::VectorXd::LinSpaced(resolution, 0.01, 0.99);
    grid.ys = grid.xs;
    grid.z.resize(resolution, resolution);
    for (Eigen::Index i = 0; i < resolution; ++i)
      for (Eigen::Index j = 0; j < resolution; ++j)
        grid.z(i, j) = model.pdf(grid.xs(i), grid.ys(j));
  }
  return grid;
}

std::vector<double>
default_levels(const Grid& grid)
{
  double z_max = grid.z.maxCoeff();
  std::vector<double> levels;
  for (int k = 1; k <= 9; ++k)
    levels.push_back(0.1 * k * z_max);
  return levels;
}

namespace {

struct Segment
{
  std::int64_t key_a;
  std::array<double, 2> pt_a;
  std::int64_t key_b;
  std::array<double, 2> pt_b;
};

// edge identity: orientation bit plus node index, unique across the grid
std::int64_t
edge_key(bool horizontal, Eigen::Index i, Eigen::Index j, Eigen::Index res)
{
  return ((static_cast<std::int64_t>(i) * res + j) << 1) |
         (horizontal ? 1 : 0);
}

} // namespace

std::vector<Polyline>
extract_contours(const Grid& grid, double level)
{
  const Eigen::Index res_x = grid.xs.size();
  const Eigen::Index res_y = grid.ys.size();
  std::vector<Segment> segments;

  auto h_point = [&](Eigen::Index i, Eigen::Index j) -> std::array<double, 2> {
    double za = grid.z(i, j), zb = grid.z(i + 1, j);
    double t = (level - za) / (zb - za);
    return { grid.xs(i) + t * (grid.xs(i + 1) - grid.xs(i)), grid.ys(j) };
  };
  auto v_point = [&](Eigen::Index i, Eigen::Index j) -> std::array<double, 2> {
    double za = grid.z(i, j), zb = grid.z(i, j + 1);
    double t = (level - za) / (zb - za);
    return { grid.xs(i), grid.ys(j) + t * (grid.ys(j + 1) - grid.ys(j)) };
  };

  for (Eigen::Index i = 0; i + 1 < res_x; ++i) {
    for (Eigen::Index j = 0; j + 1 < res_y; ++j) {
      int mask = 0;
      if (grid.z(i, j) >= level)
        mask |= 1;
      if (grid.z(i + 1, j) >= level)
        mask |= 2;
      if (grid.z(i + 1, j + 1) >= level)
        mask |= 4;
      if (grid.z(i, j + 1) >= level)
        mask |= 8;
      if (mask == 0 || mask == 15)
        continue;

      const std::int64_t bottom = edge_key(true, i, j, res_y);
      const std::int64_t top = edge_key(true, i, j + 1, res_y);
      const std::int64_t left = edge_key(false, i, j, res_y);
      const std::int64_t right = edge_key(false, i + 1, j, res_y);

      auto emit = [&](std::int64_t ka, std::array<double, 2> pa,
                      std::int64_t kb, std::array<double, 2> pb) {
        segments.push_back({ ka, pa, kb, pb });
      };
      auto pb = [&] { return h_point(i, j); };
      auto pt = [&] { return h_point(i, j + 1); };
      auto pl = [&] { return v_point(i, j); };
      auto pr = [&] { return v_point(i + 1, j); };

      switch (mask) {
        case 1:
        case 14:
          emit(left, pl(), bottom, pb());
          break;
        case 2:
        case 13:
          emit(bottom, pb(), right, pr());
          break;
        case 3:
        case 12:
          emit(left, pl(), right, pr());
          break;
        case 4:
        case 11:
          emit(top, pt(), right, pr());
          break;
        case 6:
        case 9:
          emit(bottom, pb(), top, pt());
          break;
        case 7:
        case 8:
          emit(left, pl(), top, pt());
          break;
        case 5:
        case 10: {
          double center = 0.25 * (grid.z(i, j) + grid.z(i + 1, j) +
                                  grid.z(i, j + 1) + grid.z(i + 1, j + 1));
          bool high_center = center >= level;
          bool diag = (mask == 5) == high_center;
          if (diag) {
            emit(left, pl(), top, pt());
            emit(bottom, pb(), right, pr());
          } else {
            emit(left, pl(), bottom, pb());
            emit(top, pt(), right, pr());
          }
          break;
        }
        default:
          break;
      }
    }
  }

  // stitch segments into polylines by shared edge identities
  std::unordered_map<std::int64_t, std::vector<std::pair<std::size_t, int>>>
    by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s].key_a].push_back({ s, 0 });
    by_edge[segments[s].key_b].push_back({ s, 1 });
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> polylines;
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start])
      continue;
    used[start] = true;
    Polyline line{ segments[start].pt_a, segments[start].pt_b };
    std::int64_t head = segments[start].key_a;
    std::int64_t tail = segments[start].key_b;

    auto advance = [&](std::int64_t key, bool at_front) -> bool {
      auto it = by_edge.find(key);
      if (it == by_edge.end())
        return false;
      for (auto [s, end] : it->second) {
        if (used[s])
          continue;
        used[s] = true;
        std::int64_t next = (end == 0) ? segments[s].key_b : segments[s].key_a;
        std::array<double, 2> pt =
          (end == 0) ? segments[s].pt_b : segments[s].pt_a;
        if (at_front) {
          line.insert(line.begin(), pt);
          head = next;
        } else {
          line.push_back(pt);
          tail = next;
        }
        return true;
      }
      return false;
    };

    while (advance(tail, false)) {
    }
    while (advance(head, true)) {
    }
    polylines.push_back(std::move(line));
  }
  return polylines;
}

namespace {

std::string
fmt(double x, const char* format = "%.4g")
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), format, x);
  return buf;
}

const char* const palette[] = { "#4477aa", "#66ccee", "#228833",
                                "#ccbb44", "#ee6677", "#aa3377",
                                "#bb5566", "#004488", "#997700" };

} // namespace

std::string
render_svg(const Grid& grid, Kind kind, const std::vector<double>& levels)
{
  const double width = 720.0, height = 640.0;
  const double ml = 70.0, mr = 160.0, mt = 30.0, mb = 60.0;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const double x0 = grid.xs(0), x1 = grid.xs(grid.xs.size() - 1);
  const double y0 = grid.ys(0), y1 = grid.ys(grid.ys.size() - 1);

  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
         "width=\""
      << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
      << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (kind == Kind::surface) {
    // wireframe perspective rendering
    const Eigen::Index rx = grid.xs.size(), ry = grid.ys.size();
    double z_max = std::max(grid.z.maxCoeff(), 1e-12);
    auto project = [&](Eigen::Index i, Eigen::Index j) {
      double nx = static_cast<double>(i) / static_cast<double>(rx - 1);
      double ny = static_cast<double>(j) / static_cast<double>(ry - 1);
      double nz = std::max(grid.z(i, j), 0.0) / z_max;
      double iso_x = 0.5 + 0.5 * (nx - ny);
      double iso_y = 0.30 * (nx + ny) + 0.42 * nz;
      return std::array<double, 2>{ ml + iso_x * pw,
                                    mt + ph - iso_y * ph * 0.92 };
    };
    Eigen::Index step_x = std::max<Eigen::Index>(1, rx / 48);
    Eigen::Index step_y = std::max<Eigen::Index>(1, ry / 48);
    svg << "<g fill=\"none\" stroke=\"#336699\" stroke-width=\"0.7\">\n";
    for (Eigen::Index i = 0; i < rx; i += step_x) {
      svg << "<polyline points=\"";
      for (Eigen::Index j = 0; j < ry; ++j) {
        auto p = project(i, j);
        svg << fmt(p[0], "%.2f") << ',' << fmt(p[1], "%.2f") << ' ';
      }
      svg << "\"/>\n";
    }
    for (Eigen::Index j = 0; j < ry; j += step_y) {
      svg << "<polyline points=\"";
      for (Eigen::Index i = 0; i < rx; ++i) {
        auto p = project(i, j);
        svg << fmt(p[0], "%.2f") << ',' << fmt(p[1], "%.2f") << ' ';
      }
      svg << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<text x=\"" << ml << "\" y=\"" << mt - 10
        << "\" font-family=\"sans-serif\" font-size=\"13\">density surface"
           "</text>\n";
    svg << "</svg>\n";
    return svg.str();
  }

  // axes box and ticks
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int t = 0; t <= 4; ++t) {
    double fx = x0 + (x1 - x0) * t / 4.0;
    double fy = y0 + (y1 - y0) * t / 4.0;
    svg << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\""
        << px(fx) << "\" y2=\"" << mt + ph + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\">" << fmt(fx, "%.3g") << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml
        << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\">" << fmt(fy, "%.3g") << "</text>\n";
  }
  svg << "</g>\n";

  std::vector<double> sorted_levels = levels;
  std::sort(sorted_levels.begin(), sorted_levels.end());

  for (std::size_t li = 0; li < sorted_levels.size(); ++li) {
    const char* color = palette[li % 9];
    svg << "<g fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\">\n";
    for (const Polyline& line : extract_contours(grid, sorted_levels[li])) {
      svg << "<polyline points=\"";
      for (const auto& p : line)
        svg << fmt(px(p[0]), "%.2f") << ',' << fmt(py(p[1]), "%.2f") << ' ';
      svg << "\"/>\n";
    }
    svg << "</g>\n";
  }

  // legend, ascending
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << ml + pw + 14 << "\" y=\"" << mt + 10
      << "\" font-size=\"12\">levels</text>\n";
  for (std::size_t li = 0; li < sorted_levels.size(); ++li) {
    double ly = mt + 26 + 16.0 * static_cast<double>(li);
    svg << "<line x1=\"" << ml + pw + 14 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << ml + pw + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\""
        << palette[li % 9] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly << "\">"
        << fmt(sorted_levels[li]) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string
grid_csv(const Grid& grid)
{
  std::ostringstream out;
  out << "x,y,value\n";
  for (Eigen::Index i = 0; i < grid.xs.size(); ++i)
    for (Eigen::Index j = 0; j < grid.ys.size(); ++j)
      out << csv::format_full(grid.xs(i)) << ',' << csv::format_full(grid.ys(j))
          << ',' << csv::format_full(grid.z(i, j)) << '\n';
  return out.str();
}

} // namespace plot
} // namespace ckde
