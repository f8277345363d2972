#pragma once

#include "copulakde/estimators.hpp"
#include "copulakde/interpolation.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace ckde {

struct FitOptions
{
  Eigen::Index knots = 30;
  double mult = 1.0;
  int renorm_iters = 3;
  std::optional<Bandwidth> bw_override;
  Eigen::Index min_n = 10;
};

struct FitStats
{
  double loglik;
  double edf;
  double aic;
  double caic;
  double bic;
};

//! information criteria from log-likelihood, effective parameters and n.
FitStats fit_stats(double loglik, double edf, Eigen::Index n);

struct DependenceReport
{
  double kendall;
  double spearman;
  double blomqvist;
  double gini;
  double vd_waerden;
  double minfo;
  double linfoot;
  Eigen::Index samples_used;
};

//! A fitted copula density: renormalized spline field plus fit statistics.
//! All evaluation goes through the field, so the cost of pdf/cdf/simulate
//! does not depend on the sample size. Immutable after construction.
class FittedCopula
{
public:
  static FittedCopula fit(const PseudoSample& sample, Method method,
                          const FitOptions& opts = {});

  //! reassemble a model from stored parts (deserialization path).
  FittedCopula(Method method, Bandwidth bandwidth, interp::SplineField field,
               Eigen::Index n, double loglik, double edf, int renorm_iters);

  //! copula density, interpolated and floored at zero.
  double pdf(double u, double v) const;
  Eigen::VectorXd pdf(const Eigen::MatrixX2d& pts) const;

  //! copula cdf: per-row exact integrals splined across rows and
  //! integrated; clamped to [0, 1].
  double cdf(double u, double v) const;
  Eigen::VectorXd cdf(const Eigen::MatrixX2d& pts) const;

  //! conditional cdf C(v | u), self-normalized so hfunc(1 | u) = 1.
  double hfunc(double v, double given_u) const;
  //! inverse of hfunc in v by bisection.
  double hfunc_inverse(double w, double given_u) const;

  //! draws from the fitted density by conditional inversion; quasi draws
  //! use the shifted low-discrepancy stream.
  Eigen::MatrixX2d simulate(Eigen::Index n, bool quasi = false,
                            std::uint64_t seed = 1) const;

  DependenceReport dep_measures(Eigen::Index n_qmc = 10000,
                                std::uint64_t seed = 1) const;

  FitStats stats() const { return fit_stats(loglik_, edf_, n_); }

  Method method() const { return method_; }
  const Bandwidth& bandwidth() const { return bandwidth_; }
  const interp::SplineField& field() const { return field_; }
  const Eigen::MatrixXd& cdf_table() const { return cdf_table_; }
  Eigen::Index nobs() const { return n_; }
  double loglik() const { return loglik_; }
  double edf() const { return edf_; }
  int renorm_iters() const { return renorm_iters_; }
  int newton_failures() const { return newton_failures_; }

private:
  FittedCopula(Method method, Bandwidth bandwidth, interp::SplineField field,
               Eigen::Index n, int renorm_iters);
  void build_tables();

  Method method_;
  Bandwidth bandwidth_;
  interp::SplineField field_;
  Eigen::Index n_;
  int renorm_iters_;
  double loglik_ = 0.0;
  double edf_ = 1.0;
  int newton_failures_ = 0;

  std::vector<interp::SliceIntegrator> row_slices_; // along v, per u-knot
  Eigen::MatrixXd cdf_table_;
};

} // namespace ckde
