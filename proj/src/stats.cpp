#include "copulakde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ckde {
namespace stats {

static constexpr double inv_sqrt_2pi = 0.3989422804014326779;
static constexpr double sqrt2 = 1.4142135623730950488;

double
dnorm(double x)
{
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double
pnorm(double x)
{
  return 0.5 * std::erfc(-x / sqrt2);
}

//! rational approximation (Acklam) refined by one Newton step on pnorm.
double
qnorm(double p)
{
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw std::invalid_argument("qnorm: p must lie in [0, 1]");
  if (p == 0.0)
    return -std::numeric_limits<double>::infinity();
  if (p == 1.0)
    return std::numeric_limits<double>::infinity();

  static const double a[6] = { -3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00 };
  static const double b[5] = { -5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01 };
  static const double c[6] = { -7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00 };
  static const double d[4] = { 7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00 };

  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  double e = pnorm(x) - p;
  x -= e / dnorm(x);
  return x;
}

Eigen::VectorXd
dnorm(const Eigen::VectorXd& x)
{
  return x.unaryExpr([](double v) { return dnorm(v); });
}

Eigen::VectorXd
pnorm(const Eigen::VectorXd& x)
{
  return x.unaryExpr([](double v) { return pnorm(v); });
}

Eigen::VectorXd
qnorm(const Eigen::VectorXd& p)
{
  return p.unaryExpr([](double v) { return qnorm(v); });
}

double
dbeta(double x, double p, double q)
{
  if (!(p > 0.0) || !(q > 0.0))
    throw std::invalid_argument("dbeta: shape parameters must be positive");
  if (std::isnan(x) || x < 0.0 || x > 1.0)
    return 0.0;
  if (x == 0.0) {
    if (p < 1.0)
      return std::numeric_limits<double>::infinity();
    return (p == 1.0) ? q : 0.0;
  }
  if (x == 1.0) {
    if (q < 1.0)
      return std::numeric_limits<double>::infinity();
    return (q == 1.0) ? p : 0.0;
  }
  double log_beta = std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
  return std::exp((p - 1.0) * std::log(x) + (q - 1.0) * std::log1p(-x) -
                  log_beta);
}

Eigen::Matrix2d
sample_cov(const Eigen::MatrixX2d& z)
{
  const Eigen::Index n = z.rows();
  if (n < 3)
    throw std::invalid_argument("sample_cov: need at least 3 observations");
  Eigen::RowVector2d mean = z.colwise().mean();
  Eigen::MatrixX2d centered = z.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

Eigen::Matrix2d
cov_sqrt(const Eigen::MatrixX2d& z)
{
  Eigen::Matrix2d cov = sample_cov(z);
  const double scale = std::max(cov(0, 0), cov(1, 1));
  for (int j = 0; j < 2; ++j) {
    if (cov(j, j) <= 1e-14 * std::max(scale, 1.0)) {
      std::ostringstream msg;
      msg << "cov_sqrt: degenerate data, column " << j + 1
          << " is (numerically) constant";
      throw std::runtime_error(msg.str());
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
  Eigen::Vector2d eval = solver.eigenvalues();
  if (eval.minCoeff() <= 1e-12 * eval.maxCoeff()) {
    throw std::runtime_error(
      "cov_sqrt: degenerate data, columns are (numerically) collinear");
  }
  return solver.eigenvectors() * eval.cwiseSqrt().asDiagonal() *
         solver.eigenvectors().transpose();
}

Eigen::MatrixXd
ranks_to_pseudo(const Eigen::MatrixXd& x)
{
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 1)
    throw std::invalid_argument("ranks_to_pseudo: empty input");

  Eigen::MatrixXd out(n, d);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index col = 0; col < d; ++col) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isnan(x(i, col))) {
        std::ostringstream msg;
        msg << "ranks_to_pseudo: NaN at row " << i + 1 << ", column "
            << col + 1;
        throw std::invalid_argument(msg.str());
      }
    }
    std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return x(a, col) < x(b, col);
    });
    // average ranks for tied values
    Eigen::Index i = 0;
    while (i < n) {
      Eigen::Index j = i;
      while (j + 1 < n && x(order[j + 1], col) == x(order[i], col))
        ++j;
      double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
      for (Eigen::Index k = i; k <= j; ++k)
        out(order[k], col) = avg_rank / static_cast<double>(n + 1);
      i = j + 1;
    }
  }
  return out;
}

// counts inversions by merge sort (Knight's algorithm).
static std::uint64_t
count_inversions(std::vector<double>& v, std::vector<double>& buf,
                 std::size_t lo, std::size_t hi)
{
  if (hi - lo < 2)
    return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(v, buf, lo, mid) +
                      count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid)
    buf[k++] = v[i++];
  while (j < hi)
    buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

double
kendall_tau(const Eigen::MatrixX2d& uv)
{
  const Eigen::Index n = uv.rows();
  if (n < 2)
    throw std::invalid_argument("kendall_tau: need at least 2 observations");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (uv(a, 0) != uv(b, 0))
      return uv(a, 0) < uv(b, 0);
    return uv(a, 1) < uv(b, 1);
  });
  std::vector<double> ys(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < ys.size(); ++i)
    ys[i] = uv(order[i], 1);
  std::vector<double> buf(ys.size());
  double inv = static_cast<double>(count_inversions(ys, buf, 0, ys.size()));
  double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return 1.0 - 2.0 * inv / pairs;
}

double
pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson: size mismatch or too few values");
  double mx = x.mean(), my = y.mean();
  Eigen::VectorXd cx = x.array() - mx;
  Eigen::VectorXd cy = y.array() - my;
  double denom = std::sqrt(cx.squaredNorm() * cy.squaredNorm());
  if (denom == 0.0)
    throw std::runtime_error("pearson: zero variance");
  return cx.dot(cy) / denom;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
gauss_legendre(int n, double a, double b)
{
  if (n < 2)
    throw std::invalid_argument("gauss_legendre: need at least 2 nodes");
  Eigen::VectorXd x(n), w(n);
  const double pi = 3.14159265358979323846;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration on the Legendre polynomial from the Chebyshev guess
    double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p0 / pp;
      if (std::fabs(z - z1) < 1e-15)
        break;
    }
    double xm = 0.5 * (b + a);
    double xl = 0.5 * (b - a);
    x(i) = xm - xl * z;
    x(n - 1 - i) = xm + xl * z;
    w(i) = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w(n - 1 - i) = w(i);
  }
  return { x, w };
}

static double
beta_cont_fraction(double a, double b, double x)
{
  const int max_iter = 300;
  const double eps = 3e-15, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin)
    d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin)
      d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin)
      c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin)
      d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin)
      c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps)
      break;
  }
  return h;
}

double
inc_beta(double a, double b, double x)
{
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("inc_beta: parameters must be positive");
  if (x <= 0.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return bt * beta_cont_fraction(a, b, x) / a;
  return 1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double
Rng::normal()
{
  double u1 = uniform();
  double u2 = uniform();
  // avoid log(0)
  u1 = std::max(u1, 0x1.0p-53);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

double
Rng::exponential()
{
  double u = uniform();
  return -std::log1p(-u);
}

double
Rng::gamma(double shape)
{
  if (!(shape > 0.0))
    throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    double u = uniform();
    u = std::max(u, 0x1.0p-53);
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    u = std::max(u, 0x1.0p-53);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
      return d * v;
  }
}

} // namespace stats
} // namespace ckde
