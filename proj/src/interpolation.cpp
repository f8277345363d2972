#include "copulakde/interpolation.hpp"

#include "copulakde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ckde {
namespace interp {

Eigen::VectorXd
make_knots(Eigen::Index m)
{
  if (m < 8)
    throw std::invalid_argument("make_knots: need at least 8 knots");
  Eigen::VectorXd knots(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double x = -3.0 + 6.0 * static_cast<double>(j) / static_cast<double>(m - 1);
    knots(j) = stats::pnorm(x);
  }
  return knots;
}

static SegmentPoly
segment_from_stencil(double f_m1, double f_0, double f_1, double f_2,
                     const Eigen::VectorXd& knots, Eigen::Index j)
{
  const double u_m1 = knots(j - 1);
  const double u_0 = knots(j);
  const double u_1 = knots(j + 1);
  const double u_2 = knots(j + 2);
  const double width = u_1 - u_0;

  // three-term finite differences for the endpoint derivatives
  double d_0 = (f_0 - f_m1) / (u_0 - u_m1) - (f_1 - f_m1) / (u_1 - u_m1) +
               (f_1 - f_0) / (u_1 - u_0);
  double d_1 = (f_1 - f_0) / (u_1 - u_0) - (f_2 - f_0) / (u_2 - u_0) +
               (f_2 - f_1) / (u_2 - u_1);

  // Hermite coefficients in the normalized coordinate s = (u - u_0) / width
  const double g_0 = d_0 * width;
  const double g_1 = d_1 * width;
  SegmentPoly poly;
  poly.a0 = f_0;
  poly.a1 = g_0;
  poly.a2 = -3.0 * f_0 + 3.0 * f_1 - 2.0 * g_0 - g_1;
  poly.a3 = 2.0 * f_0 - 2.0 * f_1 + g_0 + g_1;
  poly.left = u_0;
  poly.width = width;
  return poly;
}

SegmentPoly
segment_coeffs(const Eigen::VectorXd& values, const Eigen::VectorXd& knots,
               Eigen::Index j)
{
  const Eigen::Index m = knots.size();
  if (values.size() != m)
    throw std::invalid_argument("segment_coeffs: values/knots size mismatch");
  if (j < 1 || j > m - 3) {
    std::ostringstream msg;
    msg << "segment_coeffs: segment index " << j << " outside [1, " << m - 3
        << "]";
    throw std::out_of_range(msg.str());
  }
  return segment_from_stencil(values(j - 1), values(j), values(j + 1),
                              values(j + 2), knots, j);
}

Eigen::Index
segment_index(const Eigen::VectorXd& knots, double u)
{
  const Eigen::Index m = knots.size();
  if (u < knots(2))
    return 1;
  if (u >= knots(m - 3))
    return m - 3;
  const double* first = knots.data() + 2;
  const double* last = knots.data() + (m - 2);
  const double* it = std::upper_bound(first, last, u);
  return (it - knots.data()) - 1;
}

static double
bisect_root(const SegmentPoly& poly, double lo, double hi, double f_lo)
{
  for (int iter = 0; iter < 60; ++iter) {
    double mid = 0.5 * (lo + hi);
    double f_mid = poly.eval_s(mid);
    if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double
SegmentPoly::integral(double ua, double ub, bool clip_negative) const
{
  if (ub <= ua)
    return 0.0;
  const double sa = (ua - left) / width;
  const double sb = (ub - left) / width;
  if (!clip_negative)
    return width * (antideriv_s(sb) - antideriv_s(sa));

  // breakpoints at the critical points make each piece monotone
  double breaks[4];
  int nb = 0;
  breaks[nb++] = sa;
  if (a3 != 0.0) {
    double disc = 4.0 * a2 * a2 - 12.0 * a3 * a1;
    if (disc > 0.0) {
      double sq = std::sqrt(disc);
      double r1 = (-2.0 * a2 - sq) / (6.0 * a3);
      double r2 = (-2.0 * a2 + sq) / (6.0 * a3);
      if (r1 > r2)
        std::swap(r1, r2);
      if (r1 > sa && r1 < sb)
        breaks[nb++] = r1;
      if (r2 > sa && r2 < sb)
        breaks[nb++] = r2;
    }
  } else if (a2 != 0.0) {
    double r = -a1 / (2.0 * a2);
    if (r > sa && r < sb)
      breaks[nb++] = r;
  }
  breaks[nb++] = sb;

  double acc = 0.0;
  double lo = breaks[0];
  double f_lo = eval_s(lo);
  for (int i = 1; i < nb; ++i) {
    double hi = breaks[i];
    double f_hi = eval_s(hi);
    if (f_lo >= 0.0 && f_hi >= 0.0) {
      acc += antideriv_s(hi) - antideriv_s(lo);
    } else if (f_lo > 0.0 || f_hi > 0.0) {
      double root = bisect_root(*this, lo, hi, f_lo);
      if (f_lo > 0.0)
        acc += antideriv_s(root) - antideriv_s(lo);
      else
        acc += antideriv_s(hi) - antideriv_s(root);
    }
    lo = hi;
    f_lo = f_hi;
  }
  return width * acc;
}

static void
check_unit_interval(double t, const char* who)
{
  if (std::isnan(t) || t < 0.0 || t > 1.0) {
    std::ostringstream msg;
    msg << who << ": point " << t << " outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

double
interp_1d(const Eigen::VectorXd& values, const Eigen::VectorXd& knots,
          double u)
{
  check_unit_interval(u, "interp_1d");
  const Eigen::Index m = knots.size();
  const double* it = std::lower_bound(knots.data(), knots.data() + m, u);
  Eigen::Index idx = it - knots.data();
  if (idx >= 1 && idx <= m - 2 && idx < m && knots(idx) == u)
    return values(idx);
  Eigen::Index s = segment_index(knots, u);
  return segment_from_stencil(values(s - 1), values(s), values(s + 1),
                              values(s + 2), knots, s)
    .eval(u);
}

double
integrate_1d(const Eigen::VectorXd& values, const Eigen::VectorXd& knots,
             double t, bool clip_negative)
{
  check_unit_interval(t, "integrate_1d");
  const Eigen::Index m = knots.size();
  double acc = 0.0;
  for (Eigen::Index s = 1; s <= m - 3; ++s) {
    const double lo = (s == 1) ? 0.0 : knots(s);
    const double hi = (s == m - 3) ? 1.0 : knots(s + 1);
    const double b = std::min(hi, t);
    if (b <= lo)
      break;
    acc += segment_coeffs(values, knots, s).integral(lo, b, clip_negative);
    if (t <= hi)
      break;
  }
  return acc;
}

SliceIntegrator::SliceIntegrator(const Eigen::VectorXd& values,
                                 const Eigen::VectorXd& knots)
  : knots_(knots)
{
  const Eigen::Index m = knots.size();
  segments_.reserve(static_cast<std::size_t>(m - 3));
  prefix_.reserve(static_cast<std::size_t>(m - 3));
  double acc = 0.0;
  for (Eigen::Index s = 1; s <= m - 3; ++s) {
    const double lo = (s == 1) ? 0.0 : knots(s);
    const double hi = (s == m - 3) ? 1.0 : knots(s + 1);
    SegmentPoly seg = segment_from_stencil(values(s - 1), values(s),
                                           values(s + 1), values(s + 2),
                                           knots, s);
    prefix_.push_back(acc);
    acc += seg.integral(lo, hi, true);
    segments_.push_back(seg);
  }
  total_ = acc;
}

double
SliceIntegrator::integral_to(double t) const
{
  check_unit_interval(t, "SliceIntegrator::integral_to");
  const Eigen::Index m = knots_.size();
  Eigen::Index s = segment_index(knots_, t);
  const double lo = (s == 1) ? 0.0 : knots_(s);
  const std::size_t i = static_cast<std::size_t>(s - 1);
  return prefix_[i] + segments_[i].integral(lo, t, true);
}

SplineField::SplineField(Eigen::VectorXd knots, Eigen::MatrixXd values)
  : knots_(std::move(knots))
  , values_(std::move(values))
{
  const Eigen::Index m = knots_.size();
  if (m < 8)
    throw std::invalid_argument("SplineField: need at least 8 knots");
  if (values_.rows() != m || values_.cols() != m)
    throw std::invalid_argument("SplineField: values must be m x m");
  for (Eigen::Index j = 1; j < m; ++j) {
    if (!(knots_(j) > knots_(j - 1)))
      throw std::invalid_argument("SplineField: knots must increase strictly");
  }
  if (knots_(0) < 0.0 || knots_(m - 1) > 1.0)
    throw std::invalid_argument("SplineField: knots must lie in [0, 1]");
  if (!values_.allFinite() || (values_.array() < 0.0).any())
    throw std::invalid_argument(
      "SplineField: values must be finite and nonnegative");
}

double
SplineField::interpolate(double u, double v) const
{
  check_unit_interval(u, "SplineField::interpolate (u)");
  check_unit_interval(v, "SplineField::interpolate (v)");
  const Eigen::Index m = knots_.size();

  // exact hit on an anchored v-knot reduces to one pass along u
  const double* it = std::lower_bound(knots_.data(), knots_.data() + m, v);
  Eigen::Index idx = it - knots_.data();
  if (idx >= 1 && idx <= m - 2 && idx < m && knots_(idx) == v)
    return interp_1d(values_.col(idx), knots_, u);

  Eigen::Index k = segment_index(knots_, v);
  double h[4];
  for (int r = 0; r < 4; ++r)
    h[r] = interp_1d(values_.col(k - 1 + r), knots_, u);
  return segment_from_stencil(h[0], h[1], h[2], h[3], knots_, k).eval(v);
}

Eigen::VectorXd
SplineField::interpolate(const Eigen::MatrixX2d& pts) const
{
  Eigen::VectorXd out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    out(i) = interpolate(pts(i, 0), pts(i, 1));
  return out;
}

SplineField
renormalize(const SplineField& field, int iterations)
{
  if (iterations < 0)
    throw std::invalid_argument("renormalize: iterations must be >= 0");
  const Eigen::VectorXd& knots = field.knots();
  const Eigen::Index m = knots.size();
  Eigen::MatrixXd vals = field.values();

  // One proportional-fitting sweep: scale every row slice to unit marginal
  // integral, then every column slice. The relaxation exponent accelerates
  // the slowly-damped corner modes of strongly dependent fields; it is only
  // applied after a plain sweep has brought the margins near one.
  auto sweep = [&](double omega) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double margin = SliceIntegrator(vals.row(j).transpose(), knots).total();
      if (margin <= 1e-10)
        throw std::runtime_error(
          "renormalize: degenerate field, marginal integral vanishes");
      vals.row(j) *= (omega == 1.0) ? 1.0 / margin : std::pow(margin, -omega);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      double margin = SliceIntegrator(vals.col(k), knots).total();
      if (margin <= 1e-10)
        throw std::runtime_error(
          "renormalize: degenerate field, marginal integral vanishes");
      vals.col(k) *= (omega == 1.0) ? 1.0 / margin : std::pow(margin, -omega);
    }
  };

  for (int iter = 0; iter < iterations; ++iter) {
    sweep(1.0);
    sweep(1.3);
    sweep(1.3);
  }
  return SplineField(knots, std::move(vals));
}

} // namespace interp
} // namespace ckde
