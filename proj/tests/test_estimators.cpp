#include "copulakde/estimators.hpp"

#include "copulakde/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace ckde;

static constexpr double inv_sqrt_2pi = 0.3989422804014326779;

static PseudoSample
uniform_sample(Eigen::Index n, std::uint64_t seed)
{
  stats::Rng rng(seed);
  Eigen::MatrixX2d pts(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts(i, 0) = 0.001 + 0.998 * rng.uniform();
    pts(i, 1) = 0.001 + 0.998 * rng.uniform();
  }
  return PseudoSample(pts);
}

static Bandwidth
scalar_bw(double b)
{
  Bandwidth bw;
  bw.scalar = b;
  return bw;
}

static Bandwidth
matrix_bw(const Eigen::Matrix2d& m)
{
  Bandwidth bw;
  bw.matrix = m;
  return bw;
}

TEST_CASE("pseudo sample validation")
{
  Eigen::MatrixX2d ok(10, 2);
  ok.setConstant(0.5);
  CHECK_NOTHROW(PseudoSample{ ok });

  Eigen::MatrixX2d few(5, 2);
  few.setConstant(0.5);
  CHECK_THROWS_AS(PseudoSample{ few }, std::invalid_argument);
  CHECK_NOTHROW(PseudoSample(few, 2)); // configurable floor

  Eigen::MatrixX2d bad = ok;
  bad(3, 1) = 1.0;
  CHECK_THROWS_WITH_AS(PseudoSample{ bad },
                       doctest::Contains("ranks_to_pseudo"),
                       std::invalid_argument);
}

TEST_CASE("reflect_data emits the nine images, originals first")
{
  Eigen::MatrixX2d pts(2, 2);
  pts << 0.2, 0.3, 0.5, 0.5;
  Eigen::MatrixX2d aug = reflect_data(PseudoSample(pts, 2));
  REQUIRE(aug.rows() == 18);
  CHECK(aug.topRows(2) == pts);

  auto contains = [&](double u, double v) {
    for (Eigen::Index r = 0; r < aug.rows(); ++r)
      if (aug(r, 0) == u && aug(r, 1) == v)
        return true;
    return false;
  };
  CHECK(contains(-0.2, 0.3));
  CHECK(contains(0.2, 1.7));
  CHECK(contains(1.8, -0.3));
  CHECK(contains(1.8, 1.7));

  // the nine images of (0.5, 0.5) are the product set {+-0.5, 1.5}^2
  int distinct = 0;
  for (double a : { 0.5, -0.5, 1.5 })
    for (double b : { 0.5, -0.5, 1.5 })
      distinct += contains(a, b) ? 1 : 0;
  CHECK(distinct == 9);
}

TEST_CASE("eval_mr single-datum value against a direct nine-term sum")
{
  Eigen::MatrixX2d datum(1, 2);
  datum << 0.5, 0.5;
  PseudoSample sample(datum, 1);
  const double b = 0.2;

  auto kern = [&](double x) {
    return inv_sqrt_2pi * std::exp(-0.5 * (x / b) * (x / b)) / b;
  };
  double oracle = 0.0;
  const double images[9][2] = { { 0.5, 0.5 },   { -0.5, 0.5 }, { 0.5, -0.5 },
                                { -0.5, -0.5 }, { 0.5, 1.5 },  { -0.5, 1.5 },
                                { 1.5, 0.5 },   { 1.5, -0.5 }, { 1.5, 1.5 } };
  for (const auto& img : images)
    oracle += kern(0.5 - img[0]) * kern(0.5 - img[1]);

  Eigen::MatrixX2d at(1, 2);
  at << 0.5, 0.5;
  CHECK(eval_mr(sample, scalar_bw(b), at)(0) ==
        doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("eval_mr mass on the unit square")
{
  PseudoSample sample = uniform_sample(50, 31);
  for (double b : { 0.2, 0.08 }) {
    const int g = 200;
    Eigen::MatrixX2d pts(g * g, 2);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        pts(i * g + j, 0) = (i + 0.5) / g;
        pts(i * g + j, 1) = (j + 0.5) / g;
      }
    double mass = eval_mr(sample, scalar_bw(b), pts).mean();
    CHECK(std::fabs(mass - 1.0) <= 0.02);
  }
}

TEST_CASE("eval_mr domain and bandwidth errors")
{
  PseudoSample sample = uniform_sample(20, 1);
  Eigen::MatrixX2d outside(1, 2);
  outside << 1.2, 0.5;
  CHECK_THROWS_AS((void)eval_mr(sample, scalar_bw(0.1), outside),
                  std::domain_error);
  Eigen::MatrixX2d in(1, 2);
  in << 0.5, 0.5;
  CHECK_THROWS_AS((void)eval_mr(sample, scalar_bw(-0.1), in),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)eval_mr(sample, Bandwidth{}, in),
                  std::invalid_argument);
}

TEST_CASE("eval_beta single datum and corner finiteness")
{
  Eigen::MatrixX2d datum(1, 2);
  datum << 0.5, 0.5;
  PseudoSample sample(datum, 1);

  Eigen::MatrixX2d at(1, 2);
  at << 0.5, 0.5;
  // lgamma oracle for beta(0.5; 1.5, 1.5)^2
  double log_b = std::lgamma(1.5) * 2.0 - std::lgamma(3.0);
  double beta_val = std::exp(0.5 * std::log(0.5) + 0.5 * std::log(0.5) - log_b);
  CHECK(eval_beta(sample, scalar_bw(1.0), at)(0) ==
        doctest::Approx(beta_val * beta_val).epsilon(1e-12));

  PseudoSample many = uniform_sample(40, 9);
  Eigen::MatrixX2d corner(1, 2);
  corner << 0.0, 0.0;
  double b = 0.25;
  double value = eval_beta(many, scalar_bw(b), corner)(0);
  CHECK(std::isfinite(value));
  double oracle = 0.0;
  for (Eigen::Index i = 0; i < many.size(); ++i)
    oracle += stats::dbeta(many.points()(i, 0), 1.0, 1.0 / b + 1.0) *
              stats::dbeta(many.points()(i, 1), 1.0, 1.0 / b + 1.0);
  oracle /= static_cast<double>(many.size());
  CHECK(value == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("eval_beta mass on the unit square")
{
  PseudoSample sample = uniform_sample(500, 77);
  const int g = 200;
  Eigen::MatrixX2d pts(g * g, 2);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      pts(i * g + j, 0) = (i + 0.5) / g;
      pts(i * g + j, 1) = (j + 0.5) / g;
    }
  double mass = eval_beta(sample, scalar_bw(0.05), pts).mean();
  CHECK(std::fabs(mass - 1.0) <= 0.02);
}

TEST_CASE("eval_transform cancellation, symmetry and direct sum")
{
  // single transformed datum at the origin, identity bandwidth
  Eigen::MatrixX2d datum(1, 2);
  datum << 0.5, 0.5;
  PseudoSample sample(datum, 1);
  Eigen::MatrixX2d at(1, 2);
  at << 0.5, 0.5;
  CHECK(eval_transform(sample, matrix_bw(Eigen::Matrix2d::Identity()), at)(0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // three-point sample against a direct sum oracle
  Eigen::MatrixX2d three(3, 2);
  three << 0.2, 0.4, 0.6, 0.7, 0.45, 0.15;
  PseudoSample s3(three, 2);
  Eigen::Matrix2d bw_mat = 0.5 * Eigen::Matrix2d::Identity();
  Eigen::MatrixX2d pt(1, 2);
  pt << 0.3, 0.7;
  double x = stats::qnorm(0.3), y = stats::qnorm(0.7);
  double oracle = 0.0;
  for (int i = 0; i < 3; ++i) {
    double dx = (stats::qnorm(three(i, 0)) - x) / 0.5;
    double dy = (stats::qnorm(three(i, 1)) - y) / 0.5;
    oracle += std::exp(-0.5 * (dx * dx + dy * dy)) /
              (2.0 * 3.14159265358979323846 * 0.25);
  }
  oracle = (oracle / 3.0) / (stats::dnorm(x) * stats::dnorm(y));
  CHECK(eval_transform(s3, matrix_bw(bw_mat), pt)(0) ==
        doctest::Approx(oracle).epsilon(1e-12));

  Eigen::Matrix2d singular;
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS((void)eval_transform(s3, matrix_bw(singular), pt),
                  std::invalid_argument);
}

TEST_CASE("exchange symmetry for symmetric bandwidths")
{
  PseudoSample sample = uniform_sample(30, 13);
  Eigen::MatrixX2d swapped = sample.points();
  swapped.col(0).swap(swapped.col(1));
  PseudoSample sample_swapped(swapped);

  Eigen::MatrixX2d pt(1, 2), pt_swapped(1, 2);
  pt << 0.3, 0.8;
  pt_swapped << 0.8, 0.3;

  CHECK(eval_mr(sample, scalar_bw(0.15), pt)(0) ==
        eval_mr(sample_swapped, scalar_bw(0.15), pt_swapped)(0));
  CHECK(eval_beta(sample, scalar_bw(0.2), pt)(0) ==
        eval_beta(sample_swapped, scalar_bw(0.2), pt_swapped)(0));
  Eigen::Matrix2d iso = 0.4 * Eigen::Matrix2d::Identity();
  CHECK(eval_transform(sample, matrix_bw(iso), pt)(0) ==
        eval_transform(sample_swapped, matrix_bw(iso), pt_swapped)(0));
}

TEST_CASE("raw densities are nonnegative and finite everywhere")
{
  PseudoSample sample = uniform_sample(60, 5);
  Eigen::MatrixX2d pts(25, 2);
  int r = 0;
  for (double u : { 0.0, 0.25, 0.5, 0.75, 1.0 })
    for (double v : { 0.0, 0.25, 0.5, 0.75, 1.0 }) {
      pts(r, 0) = u;
      pts(r, 1) = v;
      ++r;
    }
  Bandwidth nn;
  nn.nn_alpha = 0.4;
  nn.nn_shape = unit_det_shape(sample);

  for (Method method : { Method::mr, Method::beta, Method::t, Method::tll1,
                         Method::tll2, Method::tll1nn, Method::tll2nn }) {
    Bandwidth bw;
    switch (method) {
      case Method::mr:
      case Method::beta:
        bw = scalar_bw(0.15);
        break;
      case Method::t:
      case Method::tll1:
      case Method::tll2:
        bw = matrix_bw(bandwidth_rot_t(sample));
        break;
      default:
        bw = nn;
        break;
    }
    Eigen::VectorXd dens = eval_raw(sample, method, bw, pts);
    for (Eigen::Index i = 0; i < dens.size(); ++i) {
      CHECK(std::isfinite(dens(i)));
      CHECK(dens(i) >= 0.0);
    }
  }
}

TEST_CASE("tll degree zero reduces to the transformation estimator exactly")
{
  Eigen::MatrixX2d five(5, 2);
  five << 0.1, 0.9, 0.4, 0.35, 0.62, 0.5, 0.81, 0.22, 0.33, 0.7;
  PseudoSample sample(five, 2);
  Eigen::Matrix2d bw_mat;
  bw_mat << 0.5, 0.1, 0.1, 0.4;

  Eigen::MatrixX2d pts(6, 2);
  pts << 0.1, 0.1, 0.33, 0.85, 0.5, 0.5, 0.74, 0.31, 0.9, 0.9, 0.02, 0.98;
  Eigen::VectorXd direct = eval_transform(sample, matrix_bw(bw_mat), pts);
  TllEval deg0 = eval_tll(sample, matrix_bw(bw_mat), 0, false, pts);
  CHECK(deg0.newton_failures == 0);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    CHECK(deg0.density(i) == direct(i));
}

TEST_CASE("tll recovers the independence density at the center")
{
  PseudoSample sample = uniform_sample(2000, 101);
  Eigen::MatrixX2d pt(1, 2);
  pt << 0.5, 0.5;
  Bandwidth bw = matrix_bw(bandwidth_rot_t(sample));
  TllEval eval = eval_tll(sample, bw, 1, false, pt);
  CHECK(std::fabs(eval.density(0) - 1.0) <= 0.1);
}

TEST_CASE("rule-of-thumb bandwidths")
{
  // build a sample whose transformed data has a prescribed covariance root
  auto whitened_sample = [](Eigen::Index n, const Eigen::Matrix2d& target,
                            std::uint64_t seed) {
    stats::Rng rng(seed);
    Eigen::MatrixX2d z(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      z(i, 0) = rng.normal();
      z(i, 1) = rng.normal();
    }
    z.rowwise() -= z.colwise().mean();
    Eigen::Matrix2d root = stats::cov_sqrt(z);
    Eigen::MatrixX2d white = z * root.inverse().transpose() * target;
    Eigen::MatrixX2d uv(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      uv(i, 0) = stats::pnorm(white(i, 0));
      uv(i, 1) = stats::pnorm(white(i, 1));
    }
    return PseudoSample(uv);
  };

  PseudoSample s64 = whitened_sample(64, Eigen::Matrix2d::Identity(), 3);
  Eigen::Matrix2d b_t = bandwidth_rot_t(s64);
  CHECK(b_t(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(b_t(1, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::fabs(b_t(0, 1)) < 1e-6);

  Eigen::Matrix2d doubled = bandwidth_rot_t(s64, 2.0);
  CHECK((doubled - 2.0 * b_t).norm() <= 1e-12);

  Eigen::Matrix2d diag;
  diag << 2.0, 0.0, 0.0, 3.0;
  PseudoSample s64d = whitened_sample(64, diag, 4);
  Eigen::Matrix2d b_td = bandwidth_rot_t(s64d);
  CHECK(b_td(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(b_td(1, 1) == doctest::Approx(1.5).epsilon(1e-3));

  CHECK(bandwidth_rot_tll(s64, 1)(0, 0) == doctest::Approx(1.5).epsilon(1e-6));
  PseudoSample s1024 = whitened_sample(1024, Eigen::Matrix2d::Identity(), 5);
  CHECK(bandwidth_rot_tll(s1024, 2)(0, 0) ==
        doctest::Approx(1.5).epsilon(1e-6));
  Eigen::Matrix2d diag21;
  diag21 << 2.0, 0.0, 0.0, 1.0;
  PseudoSample s1024d = whitened_sample(1024, diag21, 6);
  Eigen::Matrix2d b2 = bandwidth_rot_tll(s1024d, 2);
  CHECK(b2(0, 0) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(b2(1, 1) == doctest::Approx(1.5).epsilon(1e-3));

  CHECK_THROWS_AS((void)bandwidth_rot_tll(s64, 3), std::invalid_argument);
}

TEST_CASE("unit_det_shape has determinant one")
{
  PseudoSample sample = uniform_sample(200, 12);
  Eigen::Matrix2d shape = unit_det_shape(sample);
  CHECK(shape.determinant() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("nearest-neighbor alpha selection contract")
{
  stats::Rng rng(55);
  Eigen::MatrixX2d z(569, 2);
  for (int i = 0; i < 569; ++i) {
    z(i, 0) = rng.normal();
    z(i, 1) = rng.normal();
  }
  Eigen::MatrixXd uv = stats::ranks_to_pseudo(z);
  PseudoSample sample{ Eigen::MatrixX2d(uv) };
  double alpha = select_alpha_lscv(sample, 2);
  CHECK(alpha > 0.0);
  CHECK(alpha <= 1.0);
  CHECK(alpha >= 0.15);
  CHECK(alpha <= 0.7);

  Eigen::MatrixX2d tiny(10, 2);
  tiny.setConstant(0.4);
  CHECK_THROWS_AS((void)select_alpha_lscv(PseudoSample(tiny), 2),
                  std::invalid_argument);
}

TEST_CASE("duplicating the data never increases the selected alpha")
{
  int not_larger = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PseudoSample sample = uniform_sample(120, seed * 7 + 1);
    Eigen::MatrixX2d doubled(240, 2);
    doubled << sample.points(), sample.points();
    double alpha_orig = select_alpha_lscv(sample, 1);
    double alpha_dup = select_alpha_lscv(PseudoSample(doubled), 1);
    if (alpha_dup <= alpha_orig + 1e-12)
      ++not_larger;
  }
  CHECK(not_larger >= 4);
}

TEST_CASE("scalar bandwidth selection contract")
{
  PseudoSample sample = uniform_sample(200, 21);
  double base = std::pow(200.0, -1.0 / 6.0);
  for (Method method : { Method::mr, Method::beta }) {
    double b = select_bw_lscv_scalar(sample, method);
    CHECK(b > 0.0);
    CHECK(b <= 3.0 * base + 1e-12);
    CHECK(select_bw_lscv_scalar(sample, method, 0.5) ==
          doctest::Approx(0.5 * b).epsilon(1e-14));
  }
  CHECK_THROWS_AS((void)select_bw_lscv_scalar(sample, Method::t),
                  std::invalid_argument);
}

TEST_CASE("scalar bandwidth shrinks with the sample size")
{
  for (Method method : { Method::mr, Method::beta }) {
    double mean_small = 0.0, mean_large = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      mean_small += select_bw_lscv_scalar(uniform_sample(200, seed), method);
      mean_large +=
        select_bw_lscv_scalar(uniform_sample(1000, seed + 50), method);
    }
    CHECK(mean_large <= mean_small + 1e-12);
  }
}

TEST_CASE("mult preserves bandwidth structure")
{
  PseudoSample sample = uniform_sample(150, 42);
  Bandwidth one = select_bandwidth(sample, Method::t, 1.0);
  Bandwidth two = select_bandwidth(sample, Method::t, 2.0);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CHECK(two.matrix(r, c) == doctest::Approx(2.0 * one.matrix(r, c)));
      CHECK((two.matrix(r, c) >= 0) == (one.matrix(r, c) >= 0));
    }

  Bandwidth mr_one = select_bandwidth(sample, Method::mr, 1.0);
  Bandwidth mr_two = select_bandwidth(sample, Method::mr, 2.0);
  CHECK(mr_two.scalar == doctest::Approx(2.0 * mr_one.scalar).epsilon(1e-14));
}

TEST_CASE("method names round trip")
{
  for (Method m : { Method::mr, Method::beta, Method::t, Method::tll1,
                    Method::tll2, Method::tll1nn, Method::tll2nn })
    CHECK(method_from_string(method_to_string(m)) == m);
  CHECK(method_from_string("TLL2NN") == Method::tll2nn);
  CHECK_THROWS_AS((void)method_from_string("nope"), std::invalid_argument);
}
