#include "copulakde/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ckde;

// independent oracle: invert pnorm by bisection
static double
quantile_oracle(double p)
{
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (stats::pnorm(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TEST_CASE("gaussian basics")
{
  CHECK(stats::pnorm(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(stats::dnorm(0.0) == doctest::Approx(0.3989423).epsilon(1e-6));
  CHECK(stats::qnorm(0.975) ==
        doctest::Approx(quantile_oracle(0.975)).epsilon(1e-10));
  CHECK(stats::qnorm(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(stats::pnorm(3.0) > stats::pnorm(2.9999));
}

TEST_CASE("gaussian quantile round trip on [-6, 6]")
{
  for (double x = -6.0; x <= 6.0; x += 0.05)
    CHECK(std::fabs(stats::qnorm(stats::pnorm(x)) - x) <= 1e-8);
  // the lower tail keeps full relative precision in p, so it round-trips
  // an order of magnitude tighter
  for (double x = -6.0; x <= 0.0; x += 0.05)
    CHECK(std::fabs(stats::qnorm(stats::pnorm(x)) - x) <= 1e-9);
}

TEST_CASE("gaussian quantile signals infinity at the endpoints")
{
  CHECK(std::isinf(stats::qnorm(0.0)));
  CHECK(stats::qnorm(0.0) < 0.0);
  CHECK(std::isinf(stats::qnorm(1.0)));
  CHECK(stats::qnorm(1.0) > 0.0);
  CHECK_THROWS_AS((void)stats::qnorm(-0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)stats::qnorm(1.1), std::invalid_argument);
}

TEST_CASE("beta density values")
{
  CHECK(stats::dbeta(0.3, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(stats::dbeta(0.5, 2.0, 2.0) == doctest::Approx(1.5).epsilon(1e-14));
  // lgamma-based oracle for Beta(3, 5) at 0.1
  double oracle = std::exp(2.0 * std::log(0.1) + 4.0 * std::log(0.9) -
                           (std::lgamma(3.0) + std::lgamma(5.0) -
                            std::lgamma(8.0)));
  CHECK(stats::dbeta(0.1, 3.0, 5.0) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(stats::dbeta(-0.2, 2.0, 2.0) == 0.0);
  CHECK(stats::dbeta(1.2, 2.0, 2.0) == 0.0);
  CHECK(stats::dbeta(0.0, 1.0, 3.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS((void)stats::dbeta(0.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)stats::dbeta(0.5, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("beta density integrates to one")
{
  stats::Rng rng(42);
  const double half_pi = 1.5707963267948966;
  for (int trial = 0; trial < 10; ++trial) {
    double p = 1.0 + 7.0 * rng.uniform();
    double q = 1.0 + 7.0 * rng.uniform();
    // composite Simpson after x = sin^2(t), which regularizes the endpoints
    const int n = 4000;
    double h = half_pi / n;
    auto f = [&](double t) {
      double s = std::sin(t), c = std::cos(t);
      return stats::dbeta(s * s, p, q) * 2.0 * s * c;
    };
    double acc = f(0.0) + f(half_pi);
    for (int i = 1; i < n; ++i)
      acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    acc *= h / 3.0;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("cov_sqrt on diagonal data")
{
  // sample covariance diag(4, 9) with divisor n - 1
  double a = std::sqrt(3.0), b = 1.5 * std::sqrt(3.0);
  Eigen::MatrixX2d z(4, 2);
  z << a, b, -a, -b, a, -b, -a, b;
  Eigen::Matrix2d root = stats::cov_sqrt(z);
  CHECK(root(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(root(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::fabs(root(0, 1)) < 1e-12);
}

TEST_CASE("cov_sqrt squares back to the sample covariance")
{
  stats::Rng rng(7);
  Eigen::MatrixX2d z(50, 2);
  for (int i = 0; i < 50; ++i) {
    double x = rng.normal();
    z(i, 0) = x;
    z(i, 1) = 0.6 * x + 0.8 * rng.normal();
  }
  Eigen::Matrix2d root = stats::cov_sqrt(z);
  Eigen::Matrix2d cov = stats::sample_cov(z);
  CHECK((root * root - cov).norm() <= 1e-12 * cov.norm());
  CHECK(root(0, 1) == doctest::Approx(root(1, 0)).epsilon(1e-14));
}

TEST_CASE("cov_sqrt degenerate data errors")
{
  Eigen::MatrixX2d z(5, 2);
  z << 1, 1, 1, 2, 1, 3, 1, 4, 1, 5;
  CHECK_THROWS_WITH_AS((void)stats::cov_sqrt(z),
                       doctest::Contains("column 1"), std::runtime_error);
  Eigen::MatrixX2d w(5, 2);
  w << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10; // collinear
  CHECK_THROWS_AS((void)stats::cov_sqrt(w), std::runtime_error);
}

TEST_CASE("ranks_to_pseudo")
{
  Eigen::MatrixXd x(3, 1);
  x << 3.1, 1.2, 2.5;
  Eigen::MatrixXd r = stats::ranks_to_pseudo(x);
  CHECK(r(0, 0) == doctest::Approx(0.75));
  CHECK(r(1, 0) == doctest::Approx(0.25));
  CHECK(r(2, 0) == doctest::Approx(0.50));

  Eigen::MatrixXd sorted(9, 1);
  for (int i = 0; i < 9; ++i)
    sorted(i, 0) = i;
  Eigen::MatrixXd rs = stats::ranks_to_pseudo(sorted);
  for (int i = 0; i < 9; ++i)
    CHECK(rs(i, 0) == doctest::Approx(0.1 * (i + 1)).epsilon(1e-14));

  Eigen::MatrixXd tie(3, 1);
  tie << 1, 1, 2;
  Eigen::MatrixXd rt = stats::ranks_to_pseudo(tie);
  CHECK(rt(0, 0) == doctest::Approx(0.375));
  CHECK(rt(1, 0) == doctest::Approx(0.375));
  CHECK(rt(2, 0) == doctest::Approx(0.75));
}

TEST_CASE("ranks_to_pseudo is invariant under increasing transforms")
{
  stats::Rng rng(11);
  Eigen::MatrixXd x(40, 2);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
  }
  Eigen::MatrixXd y = x;
  y.col(0) = y.col(0).array().exp();
  y.col(1) = 5.0 * y.col(1).array() + 2.0;
  CHECK(stats::ranks_to_pseudo(x) == stats::ranks_to_pseudo(y));
}

TEST_CASE("ranks_to_pseudo rejects NaN naming the cell")
{
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, std::numeric_limits<double>::quiet_NaN(), 3, 4, 5;
  CHECK_THROWS_WITH_AS((void)stats::ranks_to_pseudo(x),
                       doctest::Contains("row 2"), std::invalid_argument);
}

TEST_CASE("kendall_tau against a brute-force count")
{
  stats::Rng rng(3);
  Eigen::MatrixX2d uv(200, 2);
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform();
    uv(i, 0) = x;
    uv(i, 1) = 0.5 * x + 0.5 * rng.uniform();
  }
  double concordant = 0.0, discordant = 0.0;
  for (int i = 0; i < 200; ++i) {
    for (int j = i + 1; j < 200; ++j) {
      double s = (uv(i, 0) - uv(j, 0)) * (uv(i, 1) - uv(j, 1));
      (s > 0 ? concordant : discordant) += 1.0;
    }
  }
  double brute = (concordant - discordant) / (concordant + discordant);
  CHECK(stats::kendall_tau(uv) == doctest::Approx(brute).epsilon(1e-12));

  Eigen::MatrixX2d mono(10, 2);
  for (int i = 0; i < 10; ++i) {
    mono(i, 0) = i;
    mono(i, 1) = i * i;
  }
  CHECK(stats::kendall_tau(mono) == doctest::Approx(1.0));
}

TEST_CASE("gauss_legendre quadrature")
{
  auto [x, w] = stats::gauss_legendre(16, 0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < 16; ++i)
    acc += w(i) * x(i) * x(i);
  CHECK(acc == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  auto [xs, ws] = stats::gauss_legendre(48, 0.0, 3.14159265358979323846);
  double s = 0.0;
  for (int i = 0; i < 48; ++i)
    s += ws(i) * std::sin(xs(i));
  CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("regularized incomplete beta")
{
  CHECK(stats::inc_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-13));
  CHECK(stats::inc_beta(2.0, 1.0, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(stats::inc_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  for (double x : { 0.1, 0.4, 0.8 })
    CHECK(stats::inc_beta(1.5, 2.5, x) ==
          doctest::Approx(1.0 - stats::inc_beta(2.5, 1.5, 1.0 - x))
            .epsilon(1e-12));
}

TEST_CASE("rng determinism and distribution sanity")
{
  stats::Rng a(123), b(123);
  for (int i = 0; i < 100; ++i)
    CHECK(a.uniform() == b.uniform());

  stats::Rng rng(99);
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    mean += rng.gamma(2.5);
  mean /= n;
  CHECK(mean == doctest::Approx(2.5).epsilon(0.03));

  stats::Rng rng2(5);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng2.normal();
    m1 += z;
    m2 += z * z;
  }
  CHECK(std::fabs(m1 / n) < 0.02);
  CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.03));
}
