#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ckde {
namespace interp {

//! knot vector for density interpolation: the Gaussian-cdf image of m
//! equidistant points on [-3, 3]. Symmetric about 0.5, m >= 8.
Eigen::VectorXd make_knots(Eigen::Index m);

//! Cubic polynomial on one knot segment, stored in the normalized local
//! coordinate s = (u - left) / width.
struct SegmentPoly
{
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double left = 0.0;
  double width = 1.0;

  double eval_s(double s) const { return ((a3 * s + a2) * s + a1) * s + a0; }
  double eval(double u) const { return eval_s((u - left) / width); }
  //! antiderivative in s, zero at s = 0 (multiply by width for du units)
  double antideriv_s(double s) const
  {
    return (((0.25 * a3 * s + a2 / 3.0) * s + 0.5 * a1) * s + a0) * s;
  }
  //! exact integral of the (optionally positive-part) cubic over [ua, ub]
  double integral(double ua, double ub, bool clip_negative) const;
};

//! cubic coefficients for segment j (0-based, valid range [1, m - 3]):
//! endpoint values plus three-term finite-difference derivatives, with the
//! derivative rescaled by the segment width for the normalized coordinate.
SegmentPoly segment_coeffs(const Eigen::VectorXd& values,
                           const Eigen::VectorXd& knots, Eigen::Index j);

//! index of the segment whose coverage set contains u; the two border
//! segments extend to 0 and 1 respectively.
Eigen::Index segment_index(const Eigen::VectorXd& knots, double u);

//! piecewise cubic interpolation of the values at u in [0, 1]; knots with
//! index in [1, m - 2] reproduce the stored value exactly.
double interp_1d(const Eigen::VectorXd& values, const Eigen::VectorXd& knots,
                 double u);

//! integral of the piecewise interpolant over [0, t] from exact segment
//! antiderivatives; with clip_negative, negative parts of the interpolant
//! are floored at zero before integrating.
double integrate_1d(const Eigen::VectorXd& values, const Eigen::VectorXd& knots,
                    double t, bool clip_negative = false);

//! Prebuilt segment decomposition of one 1-d slice with prefix integrals,
//! for repeated partial integration. Always integrates the positive part.
class SliceIntegrator
{
public:
  SliceIntegrator() = default;
  SliceIntegrator(const Eigen::VectorXd& values, const Eigen::VectorXd& knots);

  double integral_to(double t) const;
  double total() const { return total_; }

private:
  std::vector<SegmentPoly> segments_;
  std::vector<double> prefix_;
  Eigen::VectorXd knots_;
  double total_ = 0.0;
};

//! Density values on the tensor-product knot grid; values(j, k) is the
//! field at (knots[j], knots[k]). Immutable after construction.
class SplineField
{
public:
  SplineField(Eigen::VectorXd knots, Eigen::MatrixXd values);

  const Eigen::VectorXd& knots() const { return knots_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index size() const { return knots_.size(); }

  //! two-dimensional interpolation: four passes along u on the rows
  //! straddling v, then one pass along v.
  double interpolate(double u, double v) const;
  Eigen::VectorXd interpolate(const Eigen::MatrixX2d& pts) const;

private:
  Eigen::VectorXd knots_;
  Eigen::MatrixXd values_;
};

//! Iterative renormalization towards uniform margins: each iteration runs
//! stabilized proportional-fitting sweeps that rescale row and column
//! slices by their marginal integrals. A separable field normalizes in a
//! single iteration; a true copula density is a fixed point.
SplineField renormalize(const SplineField& field, int iterations);

} // namespace interp
} // namespace ckde
