#include "copulakde/model.hpp"

#include "copulakde/qmc.hpp"
#include "copulakde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ckde {

FitStats
fit_stats(double loglik, double edf, Eigen::Index n)
{
  const double nd = static_cast<double>(n);
  if (nd <= edf + 1.0)
    throw std::domain_error("fit_stats: cAIC undefined, n <= edf + 1");
  FitStats s;
  s.loglik = loglik;
  s.edf = edf;
  s.aic = -2.0 * loglik + 2.0 * edf;
  s.caic = s.aic + 2.0 * edf * (edf + 1.0) / (nd - edf - 1.0);
  s.bic = -2.0 * loglik + std::log(nd) * edf;
  return s;
}

static void
check_unit(double x, const char* who)
{
  if (std::isnan(x) || x < 0.0 || x > 1.0) {
    std::ostringstream msg;
    msg << who << ": argument " << x << " outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

static double
compute_edf(const PseudoSample& sample, Method method, const Bandwidth& bw,
            int* newton_failures)
{
  const Eigen::MatrixX2d& xy = sample.points();
  const Eigen::Index n = xy.rows();
  const double nd = static_cast<double>(n);
  constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  double edf = 0.0;

  switch (method) {
    case Method::mr: {
      Eigen::VectorXd c_hat = eval_mr(sample, bw, xy);
      double k0 = inv_sqrt_2pi / bw.scalar;
      double self = k0 * k0;
      for (Eigen::Index i = 0; i < n; ++i)
        edf += self / (nd * std::max(c_hat(i), 1e-300));
      break;
    }
    case Method::beta: {
      Eigen::VectorXd c_hat = eval_beta(sample, bw, xy);
      double inv_b = 1.0 / bw.scalar;
      for (Eigen::Index i = 0; i < n; ++i) {
        double u = xy(i, 0), v = xy(i, 1);
        double self = stats::dbeta(u, u * inv_b + 1.0, (1.0 - u) * inv_b + 1.0) *
                      stats::dbeta(v, v * inv_b + 1.0, (1.0 - v) * inv_b + 1.0);
        edf += self / (nd * std::max(c_hat(i), 1e-300));
      }
      break;
    }
    case Method::t: {
      Eigen::VectorXd c_hat = eval_transform(sample, bw, xy);
      Eigen::MatrixX2d z = to_gaussian_domain(xy);
      double k0 = 1.0 / (6.2831853071795864769 *
                         std::fabs(bw.matrix.determinant()));
      for (Eigen::Index i = 0; i < n; ++i) {
        double f_z = c_hat(i) * stats::dnorm(z(i, 0)) * stats::dnorm(z(i, 1));
        edf += k0 / (nd * std::max(f_z, 1e-300));
      }
      break;
    }
    default: {
      int degree = (method == Method::tll1 || method == Method::tll1nn) ? 1 : 2;
      bool nn = (method == Method::tll1nn || method == Method::tll2nn);
      TllEval eval = eval_tll(sample, bw, degree, nn, xy, true);
      if (newton_failures)
        *newton_failures += eval.newton_failures;
      edf = eval.influence.sum();
      break;
    }
  }
  return std::clamp(edf, 1.0, nd - 2.0);
}

FittedCopula::FittedCopula(Method method, Bandwidth bandwidth,
                           interp::SplineField field, Eigen::Index n,
                           int renorm_iters)
  : method_(method)
  , bandwidth_(std::move(bandwidth))
  , field_(std::move(field))
  , n_(n)
  , renorm_iters_(renorm_iters)
{
  build_tables();
}

FittedCopula::FittedCopula(Method method, Bandwidth bandwidth,
                           interp::SplineField field, Eigen::Index n,
                           double loglik, double edf, int renorm_iters)
  : FittedCopula(method, std::move(bandwidth), std::move(field), n,
                 renorm_iters)
{
  loglik_ = loglik;
  edf_ = edf;
}

void
FittedCopula::build_tables()
{
  const Eigen::VectorXd& knots = field_.knots();
  const Eigen::MatrixXd& vals = field_.values();
  const Eigen::Index m = knots.size();

  row_slices_.clear();
  row_slices_.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j)
    row_slices_.emplace_back(vals.row(j).transpose(), knots);

  Eigen::MatrixXd partial(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k)
      partial(j, k) = row_slices_[static_cast<std::size_t>(j)].integral_to(
        knots(k));

  cdf_table_.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    interp::SliceIntegrator column(partial.col(k), knots);
    for (Eigen::Index j = 0; j < m; ++j)
      cdf_table_(j, k) = column.integral_to(knots(j));
  }
  // iron out sub-interpolation-error dips so the table is monotone
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      double floor = 0.0;
      if (j > 0)
        floor = std::max(floor, cdf_table_(j - 1, k));
      if (k > 0)
        floor = std::max(floor, cdf_table_(j, k - 1));
      cdf_table_(j, k) = std::max(cdf_table_(j, k), floor);
    }
  }
}

FittedCopula
FittedCopula::fit(const PseudoSample& sample, Method method,
                  const FitOptions& opts)
{
  if (opts.knots < 8)
    throw std::invalid_argument("fit: need at least 8 knots");
  if (opts.renorm_iters < 0)
    throw std::invalid_argument("fit: renorm_iters must be >= 0");

  Bandwidth bw = opts.bw_override
                   ? *opts.bw_override
                   : select_bandwidth(sample, method, opts.mult);
  validate_bandwidth(method, bw);

  const Eigen::Index m = opts.knots;
  Eigen::VectorXd knots = interp::make_knots(m);
  Eigen::MatrixX2d grid_pts(m * m, 2);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      grid_pts(j * m + k, 0) = knots(j);
      grid_pts(j * m + k, 1) = knots(k);
    }
  }

  int failures = 0;
  Eigen::VectorXd raw = eval_raw(sample, method, bw, grid_pts, &failures);
  Eigen::MatrixXd values(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k)
      values(j, k) = std::max(raw(j * m + k), 0.0);

  interp::SplineField field =
    interp::renormalize(interp::SplineField(std::move(knots), std::move(values)),
                        opts.renorm_iters);

  FittedCopula model(method, std::move(bw), std::move(field), sample.size(),
                     opts.renorm_iters);
  model.newton_failures_ = failures;

  Eigen::VectorXd dens = model.pdf(sample.points());
  double loglik = 0.0;
  for (Eigen::Index i = 0; i < dens.size(); ++i)
    loglik += std::log(std::max(dens(i), 1e-20));
  model.loglik_ = loglik;
  model.edf_ = compute_edf(sample, method, model.bandwidth_,
                           &model.newton_failures_);
  return model;
}

double
FittedCopula::pdf(double u, double v) const
{
  return std::max(field_.interpolate(u, v), 0.0);
}

Eigen::VectorXd
FittedCopula::pdf(const Eigen::MatrixX2d& pts) const
{
  Eigen::VectorXd out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    out(i) = pdf(pts(i, 0), pts(i, 1));
  return out;
}

double
FittedCopula::cdf(double u, double v) const
{
  check_unit(u, "cdf");
  check_unit(v, "cdf");
  const Eigen::VectorXd& knots = field_.knots();
  const Eigen::Index m = knots.size();
  Eigen::VectorXd partial(m);
  for (Eigen::Index j = 0; j < m; ++j)
    partial(j) = row_slices_[static_cast<std::size_t>(j)].integral_to(v);
  double value = interp::SliceIntegrator(partial, knots).integral_to(u);
  return std::clamp(value, 0.0, 1.0);
}

Eigen::VectorXd
FittedCopula::cdf(const Eigen::MatrixX2d& pts) const
{
  Eigen::VectorXd out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    out(i) = cdf(pts(i, 0), pts(i, 1));
  return out;
}

//! interpolated slice of the density along v at a fixed u.
static interp::SliceIntegrator
u_slice(const interp::SplineField& field, double u)
{
  const Eigen::VectorXd& knots = field.knots();
  const Eigen::Index m = knots.size();
  Eigen::VectorXd g(m);
  for (Eigen::Index k = 0; k < m; ++k)
    g(k) = interp::interp_1d(field.values().col(k), knots, u);
  return interp::SliceIntegrator(g, knots);
}

double
FittedCopula::hfunc(double v, double given_u) const
{
  check_unit(v, "hfunc");
  check_unit(given_u, "hfunc");
  interp::SliceIntegrator slice = u_slice(field_, given_u);
  double total = slice.total();
  if (total <= 1e-300)
    return v;
  return slice.integral_to(v) / total;
}

double
FittedCopula::hfunc_inverse(double w, double given_u) const
{
  check_unit(w, "hfunc_inverse");
  check_unit(given_u, "hfunc_inverse");
  if (w <= 0.0)
    return 0.0;
  if (w >= 1.0)
    return 1.0;
  interp::SliceIntegrator slice = u_slice(field_, given_u);
  double total = slice.total();
  if (total <= 1e-300)
    return w;
  double lo = 0.0, hi = 1.0;
  double mid = 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    mid = 0.5 * (lo + hi);
    double f = slice.integral_to(mid) / total - w;
    if (std::fabs(f) <= 1e-12)
      break;
    if (f < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

Eigen::MatrixX2d
FittedCopula::simulate(Eigen::Index n, bool quasi, std::uint64_t seed) const
{
  if (n < 1)
    throw std::invalid_argument("simulate: n must be positive");
  Eigen::MatrixX2d w(n, 2);
  if (quasi) {
    qmc::QuasiStream stream = qmc::QuasiStream::shifted(seed);
    w = qmc::quasi_points(stream, n);
  } else {
    stats::Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i, 0) = rng.uniform();
      w(i, 1) = rng.uniform();
    }
  }
  Eigen::MatrixX2d out(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, 0) = w(i, 0);
    out(i, 1) = hfunc_inverse(w(i, 1), w(i, 0));
  }
  return out;
}

DependenceReport
FittedCopula::dep_measures(Eigen::Index n_qmc, std::uint64_t seed) const
{
  Eigen::MatrixX2d sample = simulate(n_qmc, true, seed);
  Eigen::VectorXd cdf_vals = cdf(sample);
  Eigen::VectorXd dens = pdf(sample);

  DependenceReport report;
  report.samples_used = n_qmc;
  report.kendall = 4.0 * cdf_vals.mean() - 1.0;
  report.spearman =
    12.0 * (sample.col(0).array() * sample.col(1).array()).mean() - 3.0;
  report.blomqvist = 4.0 * cdf(0.5, 0.5) - 1.0;
  report.gini =
    2.0 *
    ((sample.col(0).array() + sample.col(1).array() - 1.0).abs() -
     (sample.col(0).array() - sample.col(1).array()).abs())
      .mean();
  Eigen::MatrixX2d z = to_gaussian_domain(sample);
  report.vd_waerden = stats::pearson(z.col(0), z.col(1));
  double minfo = 0.0;
  for (Eigen::Index i = 0; i < dens.size(); ++i)
    minfo += std::log(std::max(dens(i), 1e-20));
  report.minfo = minfo / static_cast<double>(dens.size());
  report.linfoot = std::sqrt(1.0 - std::exp(-2.0 * std::max(report.minfo, 0.0)));
  return report;
}

} // namespace ckde
