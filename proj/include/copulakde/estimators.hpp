#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>

namespace ckde {

enum class Method
{
  mr,
  beta,
  t,
  tll1,
  tll2,
  tll1nn,
  tll2nn
};

Method method_from_string(const std::string& name);
std::string method_to_string(Method method);

//! smoothing parameters; only the fields relevant to a method are set.
struct Bandwidth
{
  double scalar = std::numeric_limits<double>::quiet_NaN();
  Eigen::Matrix2d matrix =
    Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
  double nn_alpha = std::numeric_limits<double>::quiet_NaN();
  Eigen::Matrix2d nn_shape =
    Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
  double mult = 1.0;
};

//! throws unless the bandwidth carries exactly the fields the method needs.
void validate_bandwidth(Method method, const Bandwidth& bw);

//! n x 2 observations with both coordinates strictly inside (0, 1).
class PseudoSample
{
public:
  explicit PseudoSample(Eigen::MatrixX2d points, Eigen::Index min_n = 10);

  const Eigen::MatrixX2d& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }

private:
  Eigen::MatrixX2d points_;
};

//! mirror images of the sample at all edges and corners of the unit
//! square; block k of n rows holds the k-th image of every point, so the
//! first n rows reproduce the input.
Eigen::MatrixX2d reflect_data(const PseudoSample& sample);

//! maps copula data to the Gaussian domain by the normal quantile, with
//! coordinates clamped away from {0, 1}.
Eigen::MatrixX2d to_gaussian_domain(const Eigen::MatrixX2d& uv);

//! mirror-reflection estimator (Gaussian product kernel on reflected data).
Eigen::VectorXd eval_mr(const PseudoSample& sample, const Bandwidth& bw,
                        const Eigen::MatrixX2d& pts);

//! beta-kernel estimator with evaluation-point dependent shapes.
Eigen::VectorXd eval_beta(const PseudoSample& sample, const Bandwidth& bw,
                          const Eigen::MatrixX2d& pts);

//! transformation estimator: Gaussian-kernel density of the transformed
//! data divided by the product of normal densities.
Eigen::VectorXd eval_transform(const PseudoSample& sample, const Bandwidth& bw,
                               const Eigen::MatrixX2d& pts);

struct TllEval
{
  Eigen::VectorXd density;
  //! per-point degrees-of-freedom contributions (filled on request)
  Eigen::VectorXd influence;
  int newton_failures = 0;
};

//! transformation local likelihood estimator: per evaluation point, a
//! polynomial model of the log-density is fitted by Newton iteration;
//! degree 0 reduces to the plain transformation estimator. Points where
//! the iteration fails fall back to the plain estimate and are counted.
TllEval eval_tll(const PseudoSample& sample, const Bandwidth& bw, int degree,
                 bool nearest_neighbor, const Eigen::MatrixX2d& pts,
                 bool want_influence = false);

//! normal reference rule on the transformed domain, n^(-1/6) * cov^(1/2).
Eigen::Matrix2d bandwidth_rot_t(const PseudoSample& sample, double mult = 1.0);

//! rule of thumb for local likelihood, 3 n^(-1/(4q*+2)) * cov^(1/2).
Eigen::Matrix2d bandwidth_rot_tll(const PseudoSample& sample, int degree,
                                  double mult = 1.0);

//! covariance square root of the transformed data scaled to determinant 1.
Eigen::Matrix2d unit_det_shape(const PseudoSample& sample);

//! nearest-neighbor fraction by univariate least-squares cross-validation
//! on the first principal component of the transformed data.
double select_alpha_lscv(const PseudoSample& sample, int degree);

//! scalar bandwidth for MR/beta by bivariate least-squares cross-validation
//! over a fixed grid of multiples of n^(-1/6); the result is scaled by mult.
double select_bw_lscv_scalar(const PseudoSample& sample, Method method,
                             double mult = 1.0);

//! per-method automatic bandwidth selection.
Bandwidth select_bandwidth(const PseudoSample& sample, Method method,
                           double mult = 1.0);

//! raw (pre-renormalization) density of any method at the given points.
Eigen::VectorXd eval_raw(const PseudoSample& sample, Method method,
                         const Bandwidth& bw, const Eigen::MatrixX2d& pts,
                         int* newton_failures = nullptr);

} // namespace ckde
