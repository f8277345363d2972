#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace ckde {
namespace stats {

// Standard Gaussian density, cdf, and quantile (Phi, phi, Phi^{-1}).
double dnorm(double x);
double pnorm(double x);

//! quantile of the standard Gaussian; returns -inf/+inf at p = 0/1.
double qnorm(double p);

Eigen::VectorXd dnorm(const Eigen::VectorXd& x);
Eigen::VectorXd pnorm(const Eigen::VectorXd& x);
Eigen::VectorXd qnorm(const Eigen::VectorXd& p);

//! density of a Beta(p, q) random variable; zero outside [0, 1].
double dbeta(double x, double p, double q);

//! sample covariance matrix (divisor n - 1) of an n x 2 data matrix.
Eigen::Matrix2d sample_cov(const Eigen::MatrixX2d& z);

//! symmetric positive semi-definite square root of the sample covariance.
//! Throws on (near-)degenerate data, naming the offending column.
Eigen::Matrix2d cov_sqrt(const Eigen::MatrixX2d& z);

//! column-wise rank transform: average ranks divided by n + 1.
//! All outputs lie strictly inside (0, 1).
Eigen::MatrixXd ranks_to_pseudo(const Eigen::MatrixXd& x);

//! sample Kendall's tau via inversion counting, O(n log n).
double kendall_tau(const Eigen::MatrixX2d& uv);

//! Pearson correlation coefficient.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

//! Gauss-Legendre nodes and weights on [a, b].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a,
                                                           double b);

//! regularized incomplete beta function I_x(a, b).
double inc_beta(double a, double b, double x);

//! Deterministic pseudo-random generator with fixed bit-level mappings,
//! so that seeded output is identical across platforms and standard
//! library implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : gen_(seed)
  {
  }

  //! uniform draw on [0, 1)
  double uniform()
  {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  //! standard normal draw (Box-Muller, two uniforms per call)
  double normal();

  //! unit-rate exponential draw
  double exponential();

  //! Gamma(shape, 1) draw (Marsaglia-Tsang)
  double gamma(double shape);

  double chisq(double df) { return 2.0 * gamma(0.5 * df); }

private:
  std::mt19937_64 gen_;
};

} // namespace stats
} // namespace ckde
