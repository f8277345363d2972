#include "copulakde/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ckde {
namespace bench {

std::string
Scenario::id() const
{
  std::ostringstream out;
  out << family_to_string(family);
  if (family != Family::independence) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", tau);
    out << "_tau" << buf;
  }
  out << "_n" << n;
  return out.str();
}

const Eigen::MatrixX2d&
iae_grid()
{
  static const Eigen::MatrixX2d grid = [] {
    Eigen::MatrixX2d g(100 * 100, 2);
    for (int j = 1; j <= 100; ++j) {
      for (int k = 1; k <= 100; ++k) {
        g((j - 1) * 100 + (k - 1), 0) = j / 101.0;
        g((j - 1) * 100 + (k - 1), 1) = k / 101.0;
      }
    }
    return g;
  }();
  return grid;
}

double
iae(const std::function<double(double, double)>& estimate,
    const ParametricCopula& truth)
{
  const Eigen::MatrixX2d& grid = iae_grid();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    double u = grid(i, 0), v = grid(i, 1);
    acc += std::fabs(estimate(u, v) - truth.pdf(u, v));
  }
  return acc / static_cast<double>(grid.rows());
}

std::vector<Scenario>
default_scenarios()
{
  std::vector<Scenario> scenarios;
  for (Eigen::Index n : { 200, 1000 })
    scenarios.push_back({ Family::independence, 0.0, n });
  for (Family family : { Family::gaussian, Family::gumbel }) {
    for (double tau : { 0.3, 0.7 }) {
      for (Eigen::Index n : { 200, 1000 })
        scenarios.push_back({ family, tau, n });
    }
  }
  return scenarios;
}

static std::uint64_t
mix_seed(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<StudyResult>
run_study(const StudyConfig& config)
{
  using clock = std::chrono::steady_clock;
  std::vector<StudyResult> results;
  results.reserve(config.scenarios.size() * config.methods.size() *
                  static_cast<std::size_t>(config.reps));

  for (std::size_t si = 0; si < config.scenarios.size(); ++si) {
    const Scenario& scenario = config.scenarios[si];
    ParametricCopula truth =
      scenario.family == Family::independence
        ? ParametricCopula(Family::independence, 0.0)
        : ParametricCopula::from_tau(scenario.family, scenario.tau);

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      Method method = config.methods[mi];
      for (int rep = 0; rep < config.reps; ++rep) {
        StudyResult row;
        row.scenario = scenario.id();
        row.method = method_to_string(method);
        row.rep = rep;
        std::uint64_t seed =
          mix_seed(mix_seed(mix_seed(config.seed, si), mi),
                   static_cast<std::uint64_t>(rep));
        try {
          Eigen::MatrixX2d data = truth.sample(scenario.n, seed);
          PseudoSample sample(data);

          FitOptions opts;
          opts.knots = config.knots;
          opts.renorm_iters = config.renorm_iters;
          auto t0 = clock::now();
          FittedCopula fitted = FittedCopula::fit(sample, method, opts);
          Eigen::VectorXd dens = fitted.pdf(iae_grid());
          auto t1 = clock::now();
          row.millis =
            std::chrono::duration<double, std::milli>(t1 - t0).count();

          FitOptions raw_opts = opts;
          raw_opts.renorm_iters = 0;
          raw_opts.bw_override = fitted.bandwidth();
          FittedCopula raw_fit = FittedCopula::fit(sample, method, raw_opts);

          const Eigen::MatrixX2d& grid = iae_grid();
          double acc_renorm = 0.0;
          for (Eigen::Index i = 0; i < grid.rows(); ++i)
            acc_renorm += std::fabs(dens(i) - truth.pdf(grid(i, 0), grid(i, 1)));
          row.iae_renorm = acc_renorm / static_cast<double>(grid.rows());
          row.iae_raw = iae(
            [&](double u, double v) { return raw_fit.pdf(u, v); }, truth);
        } catch (const std::exception&) {
          row.failed = true;
        }
        results.push_back(std::move(row));
      }
    }
  }
  return results;
}

static std::string
format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string
results_csv(const std::vector<StudyResult>& results)
{
  std::ostringstream out;
  out << "scenario,method,rep,iae_raw,iae_renorm,millis\n";
  for (const StudyResult& row : results) {
    out << row.scenario << ',' << row.method << ',' << row.rep << ',';
    if (row.failed) {
      out << ",,";
    } else {
      out << format_double(row.iae_raw) << ','
          << format_double(row.iae_renorm) << ',' << format_double(row.millis);
    }
    out << '\n';
  }
  return out.str();
}

std::string
summary_table(const std::vector<StudyResult>& results)
{
  struct Cell
  {
    double sum_raw = 0.0;
    double sum_renorm = 0.0;
    double sum_gain = 0.0;
    int ok = 0;
    int failed = 0;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  for (const StudyResult& row : results) {
    Cell& cell = cells[{ row.scenario, row.method }];
    if (row.failed) {
      ++cell.failed;
    } else {
      cell.sum_raw += row.iae_raw;
      cell.sum_renorm += row.iae_renorm;
      cell.sum_gain += row.renorm_gain();
      ++cell.ok;
    }
  }

  std::ostringstream out;
  out << "scenario                 method   mean_iae_raw  mean_iae_renorm  "
         "mean_gain  status\n";
  for (const auto& [key, cell] : cells) {
    char buf[160];
    if (cell.ok == 0 || cell.failed > cell.ok) {
      std::snprintf(buf, sizeof(buf), "%-24s %-8s %13s %16s %10s  aborted (%d/%d failed)",
                    key.first.c_str(), key.second.c_str(), "-", "-", "-",
                    cell.failed, cell.failed + cell.ok);
    } else {
      std::snprintf(buf, sizeof(buf), "%-24s %-8s %13.5f %16.5f %9.1f%%  ok",
                    key.first.c_str(), key.second.c_str(),
                    cell.sum_raw / cell.ok, cell.sum_renorm / cell.ok,
                    100.0 * cell.sum_gain / cell.ok);
    }
    out << buf << '\n';
  }
  return out.str();
}

} // namespace bench
} // namespace ckde
