#pragma once

#include "copulakde/model.hpp"
#include "copulakde/parametric.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ckde {
namespace bench {

struct Scenario
{
  Family family;
  double tau;      // ignored for the independence family
  Eigen::Index n;

  std::string id() const;
};

struct StudyResult
{
  std::string scenario;
  std::string method;
  int rep = 0;
  double iae_raw = std::numeric_limits<double>::quiet_NaN();
  double iae_renorm = std::numeric_limits<double>::quiet_NaN();
  double millis = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;

  double renorm_gain() const { return (iae_raw - iae_renorm) / iae_raw; }
};

//! integrated absolute error: mean of |estimate - truth| over the grid
//! (j/101, k/101), j, k = 1..100.
double iae(const std::function<double(double, double)>& estimate,
           const ParametricCopula& truth);

//! the evaluation grid used by iae (10000 x 2 points).
const Eigen::MatrixX2d& iae_grid();

struct StudyConfig
{
  std::vector<Scenario> scenarios;
  std::vector<Method> methods;
  int reps = 20;
  std::uint64_t seed = 1;
  Eigen::Index knots = 30;
  int renorm_iters = 3;
};

//! desk-scale default matrix: independence plus Gaussian/Gumbel at
//! tau in {0.3, 0.7}, each with n in {200, 1000}.
std::vector<Scenario> default_scenarios();

//! runs the full study: per replicate, simulate, fit with and without
//! renormalization (sharing the selected bandwidth) and record both IAEs
//! plus the fit-and-evaluate wall time. Fit failures are recorded, not
//! fatal. Fully deterministic given the seed.
std::vector<StudyResult> run_study(const StudyConfig& config);

//! CSV table: scenario, method, rep, iae_raw, iae_renorm, millis.
std::string results_csv(const std::vector<StudyResult>& results);

//! per-(scenario, method) means of both IAEs and the renormalization gain.
std::string summary_table(const std::vector<StudyResult>& results);

} // namespace bench
} // namespace ckde
