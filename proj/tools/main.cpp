#include "copulakde/csv.hpp"
#include "copulakde/model.hpp"
#include "copulakde/model_io.hpp"
#include "copulakde/plot.hpp"
#include "copulakde/stats.hpp"
#include "copulakde/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ckde;

std::string
describe_method(Method method)
{
  switch (method) {
    case Method::mr:
      return "Mirror reflection";
    case Method::beta:
      return "Beta kernels";
    case Method::t:
      return "Transformation";
    case Method::tll1:
      return "Transformation local likelihood, log-linear";
    case Method::tll2:
      return "Transformation local likelihood, log-quadratic";
    case Method::tll1nn:
      return "Transformation local likelihood, log-linear (nearest-neighbor)";
    default:
      return "Transformation local likelihood, log-quadratic "
             "(nearest-neighbor)";
  }
}

std::string
format_matrix(const Eigen::Matrix2d& m)
{
  char buf[128];
  // column-major, matching the conventional matrix(c(...), 2, 2) layout
  std::snprintf(buf, sizeof(buf), "matrix(c(%.4g, %.4g, %.4g, %.4g), 2, 2)",
                m(0, 0), m(1, 0), m(0, 1), m(1, 1));
  return buf;
}

void
print_summary(std::ostream& out, const FittedCopula& model)
{
  FitStats stats = model.stats();
  out << "Kernel copula density estimate\n";
  out << "------------------------------\n";
  out << "Observations: " << model.nobs() << "\n";
  out << "Method:       " << describe_method(model.method()) << "\n";
  const Bandwidth& bw = model.bandwidth();
  char line[160];
  switch (model.method()) {
    case Method::mr:
    case Method::beta:
      std::snprintf(line, sizeof(line), "Bandwidth:    b = %.7g", bw.scalar);
      out << line << "\n";
      break;
    case Method::t:
    case Method::tll1:
    case Method::tll2:
      out << "Bandwidth:    B = " << format_matrix(bw.matrix) << "\n";
      break;
    default:
      std::snprintf(line, sizeof(line), "Bandwidth:    alpha = %.7g",
                    bw.nn_alpha);
      out << line << "\n";
      out << "              B = " << format_matrix(bw.nn_shape) << "\n";
      break;
  }
  out << "---\n";
  std::snprintf(line, sizeof(line),
                "logLik: %.2f    AIC: %.2f    cAIC: %.2f    BIC: %.2f",
                stats.loglik, stats.aic, stats.caic, stats.bic);
  out << line << "\n";
  std::snprintf(line, sizeof(line), "Effective number of parameters: %.2f",
                stats.edf);
  out << line << "\n";
}

Eigen::MatrixX2d
two_columns(const csv::Table& table, const std::string& path,
            std::vector<Eigen::Index> cols)
{
  if (cols.empty())
    cols = { 0, 1 };
  if (table.data.cols() < 2)
    throw std::runtime_error("'" + path + "' must have at least 2 columns");
  for (Eigen::Index c : cols) {
    if (c < 0 || c >= table.data.cols()) {
      std::ostringstream msg;
      msg << path << ": column " << c + 1 << " out of range (file has "
          << table.data.cols() << ")";
      throw std::runtime_error(msg.str());
    }
  }
  Eigen::MatrixX2d out(table.data.rows(), 2);
  out.col(0) = table.data.col(cols[0]);
  out.col(1) = table.data.col(cols[1]);
  return out;
}

void
write_text(const std::string& path, const std::string& text)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out)
    throw std::runtime_error("failed writing '" + path + "'");
}

struct FitArgs
{
  std::string input;
  std::string output;
  std::string method = "tll2nn";
  Eigen::Index knots = 30;
  double mult = 1.0;
  int renorm_iters = 3;
  bool ranks = false;
  std::uint64_t seed = 1;
  std::vector<Eigen::Index> cols;
};

int
run_fit(const FitArgs& args)
{
  csv::Table table = csv::read_table(args.input);
  std::vector<Eigen::Index> cols = args.cols; // given 1-based
  for (Eigen::Index& c : cols)
    --c;
  Eigen::MatrixX2d data = two_columns(table, args.input, cols);
  if (args.ranks)
    data = stats::ranks_to_pseudo(data);

  Method method = method_from_string(args.method);
  FitOptions opts;
  opts.knots = args.knots;
  opts.mult = args.mult;
  opts.renorm_iters = args.renorm_iters;

  std::optional<PseudoSample> sample;
  try {
    sample.emplace(std::move(data));
  } catch (const std::invalid_argument& e) {
    if (!args.ranks)
      throw std::runtime_error(std::string(e.what()) +
                               " (hint: pass --ranks to rank-transform raw "
                               "data first)");
    throw;
  }

  FittedCopula model = FittedCopula::fit(*sample, method, opts);
  io::save_model(model, args.output);
  print_summary(std::cout, model);
  if (model.newton_failures() > 0) {
    std::cerr << "note: " << model.newton_failures()
              << " local-likelihood points fell back to the plain "
                 "transformation estimate\n";
  }
  return 0;
}

struct EvalArgs
{
  std::string model;
  std::string points;
  std::string output;
  std::string what = "density";
};

int
run_eval(const EvalArgs& args)
{
  FittedCopula model = io::load_model(args.model);
  csv::Table table = csv::read_table(args.points);
  Eigen::MatrixX2d pts = two_columns(table, args.points, {});

  Eigen::VectorXd values(pts.rows());
  if (args.what == "density") {
    values = model.pdf(pts);
  } else if (args.what == "cdf") {
    values = model.cdf(pts);
  } else if (args.what == "hfunc") {
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      values(i) = model.hfunc(pts(i, 1), pts(i, 0));
  } else {
    throw std::runtime_error("--what must be density, cdf or hfunc, got '" +
                             args.what + "'");
  }

  Eigen::MatrixXd out(pts.rows(), 3);
  out.leftCols(2) = pts;
  out.col(2) = values;
  csv::write_table(args.output, { "u", "v", args.what }, out);
  return 0;
}

struct SampleArgs
{
  std::string model;
  std::string output;
  Eigen::Index n = 100;
  bool quasi = false;
  std::uint64_t seed = 1;
};

int
run_sample(const SampleArgs& args)
{
  FittedCopula model = io::load_model(args.model);
  Eigen::MatrixX2d draws = model.simulate(args.n, args.quasi, args.seed);
  csv::write_table(args.output, { "u", "v" }, draws);
  return 0;
}

int
run_summary(const std::string& path)
{
  FittedCopula model = io::load_model(path);
  print_summary(std::cout, model);
  return 0;
}

int
run_measures(const std::string& path, Eigen::Index n_qmc, std::uint64_t seed)
{
  FittedCopula model = io::load_model(path);
  DependenceReport report = model.dep_measures(n_qmc, seed);
  char line[200];
  std::snprintf(line, sizeof(line), "%10s %10s %10s %10s %11s %10s %10s",
                "kendall", "spearman", "blomqvist", "gini", "vd_waerden",
                "minfo", "linfoot");
  std::cout << line << "\n";
  std::snprintf(line, sizeof(line),
                "%10.7f %10.7f %10.7f %10.7f %11.7f %10.7f %10.7f",
                report.kendall, report.spearman, report.blomqvist,
                report.gini, report.vd_waerden, report.minfo, report.linfoot);
  std::cout << line << "\n";
  std::cout << "samples used: " << report.samples_used << "\n";
  return 0;
}

struct PlotArgs
{
  std::string model;
  std::string kind = "norm-contour";
  Eigen::Index resolution = 100;
  std::vector<double> levels;
  std::string svg;
  std::string grid_csv_path;
};

int
run_plot(const PlotArgs& args)
{
  if (args.svg.empty() && args.grid_csv_path.empty())
    throw std::runtime_error("plot: pass --svg and/or --grid-csv");
  for (double level : args.levels) {
    if (!(level > 0.0))
      throw std::runtime_error("plot: levels must be positive");
  }

  FittedCopula model = io::load_model(args.model);
  plot::Kind kind = plot::kind_from_string(args.kind);
  plot::Grid grid = plot::eval_grid(model, kind, args.resolution);

  if (!args.grid_csv_path.empty())
    write_text(args.grid_csv_path, plot::grid_csv(grid));
  if (!args.svg.empty()) {
    std::vector<double> levels = args.levels;
    if (levels.empty() && kind != plot::Kind::surface)
      levels = plot::default_levels(grid);
    if (kind != plot::Kind::surface && levels.empty())
      throw std::runtime_error("plot: empty level set");
    write_text(args.svg, plot::render_svg(grid, kind, levels));
  }
  return 0;
}

struct BenchArgs
{
  std::string families = "independence,gaussian,gumbel";
  std::string taus = "0.3,0.7";
  std::string sizes = "200,1000";
  std::string methods = "mr,beta,t,tll1,tll2,tll1nn,tll2nn";
  int reps = 20;
  std::uint64_t seed = 1;
  Eigen::Index knots = 30;
  std::string out_prefix = "bench_";
};

std::vector<std::string>
split_list(const std::string& text)
{
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty())
      items.push_back(item);
  return items;
}

int
run_bench(const BenchArgs& args)
{
  bench::StudyConfig config;
  config.reps = args.reps;
  config.seed = args.seed;
  config.knots = args.knots;

  std::vector<double> taus;
  for (const std::string& t : split_list(args.taus))
    taus.push_back(std::stod(t));
  std::vector<Eigen::Index> sizes;
  for (const std::string& n : split_list(args.sizes))
    sizes.push_back(static_cast<Eigen::Index>(std::stoll(n)));
  if (taus.empty() || sizes.empty())
    throw std::runtime_error("bench: need at least one tau and one n");

  for (const std::string& name : split_list(args.families)) {
    bench::Family family = bench::family_from_string(name);
    if (family == bench::Family::independence) {
      for (Eigen::Index n : sizes)
        config.scenarios.push_back({ family, 0.0, n });
    } else {
      for (double tau : taus)
        for (Eigen::Index n : sizes)
          config.scenarios.push_back({ family, tau, n });
    }
  }
  for (const std::string& name : split_list(args.methods))
    config.methods.push_back(method_from_string(name));
  if (config.scenarios.empty() || config.methods.empty())
    throw std::runtime_error("bench: empty scenario or method list");

  std::vector<bench::StudyResult> results = bench::run_study(config);
  write_text(args.out_prefix + "results.csv", bench::results_csv(results));
  std::string summary = bench::summary_table(results);
  write_text(args.out_prefix + "summary.txt", summary);
  std::cout << summary;
  return 0;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "kernel copula density estimation toolkit" };
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
    "fit", "fit a copula density to a two-column CSV of observations");
  fit->add_option("input", fit_args.input, "input CSV file")->required();
  fit->add_option("--method", fit_args.method,
                  "mr, beta, t, tll1, tll2, tll1nn or tll2nn (default)");
  fit->add_option("--knots", fit_args.knots, "grid size (default 30)");
  fit->add_option("--mult", fit_args.mult, "bandwidth multiplier");
  fit->add_option("--renorm-iter", fit_args.renorm_iters,
                  "renormalization iterations (default 3)");
  fit->add_flag("--ranks", fit_args.ranks,
                "rank-transform the input columns to pseudo-observations");
  fit->add_option("--seed", fit_args.seed,
                  "seed reserved for stochastic selectors (the provided "
                  "methods are deterministic)");
  fit->add_option("--cols", fit_args.cols,
                  "1-based column pair to use (default: 1 2)")
    ->expected(2);
  fit->add_option("-o,--output", fit_args.output, "model file to write")
    ->required();

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
    "eval", "evaluate density, cdf or conditional cdf at points");
  eval->add_option("model", eval_args.model, "model file")->required();
  eval->add_option("--points", eval_args.points, "CSV of (u, v) points")
    ->required();
  eval->add_option("--what", eval_args.what, "density (default), cdf, hfunc");
  eval->add_option("-o,--output", eval_args.output, "output CSV")->required();

  SampleArgs sample_args;
  CLI::App* sample =
    app.add_subcommand("sample", "simulate draws from a fitted model");
  sample->add_option("model", sample_args.model, "model file")->required();
  sample->add_option("-n", sample_args.n, "number of draws")->required();
  sample->add_flag("--quasi", sample_args.quasi,
                   "use the low-discrepancy stream");
  sample->add_option("--seed", sample_args.seed, "random seed");
  sample->add_option("-o,--output", sample_args.output, "output CSV")
    ->required();

  std::string summary_model;
  CLI::App* summary =
    app.add_subcommand("summary", "print the stored fit summary");
  summary->add_option("model", summary_model, "model file")->required();

  std::string measures_model;
  Eigen::Index measures_n = 10000;
  std::uint64_t measures_seed = 1;
  CLI::App* measures =
    app.add_subcommand("measures", "dependence measures of a fitted model");
  measures->add_option("model", measures_model, "model file")->required();
  measures->add_option("--n-qmc", measures_n,
                       "low-discrepancy sample size (default 10000)");
  measures->add_option("--seed", measures_seed, "seed for the stream shift");

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot", "density plots as SVG");
  plot->add_option("model", plot_args.model, "model file")->required();
  plot->add_option("--kind", plot_args.kind,
                   "surface, contour or norm-contour (default)");
  plot->add_option("--resolution", plot_args.resolution,
                   "grid resolution (default 100)");
  plot->add_option("--levels", plot_args.levels,
                   "contour levels (default: fractions of the maximum)");
  plot->add_option("--svg", plot_args.svg, "SVG output path");
  plot->add_option("--grid-csv", plot_args.grid_csv_path,
                   "grid dump output path");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
    "bench", "run the simulation study and write results tables");
  bench->add_option("--families", bench_args.families,
                    "comma list (default independence,gaussian,gumbel)");
  bench->add_option("--taus", bench_args.taus, "comma list (default 0.3,0.7)");
  bench->add_option("--n", bench_args.sizes, "comma list (default 200,1000)");
  bench->add_option("--methods", bench_args.methods,
                    "comma list (default: all seven)");
  bench->add_option("--reps", bench_args.reps, "replicates (default 20)");
  bench->add_option("--seed", bench_args.seed, "base seed");
  bench->add_option("--knots", bench_args.knots, "grid size (default 30)");
  bench->add_option("--out", bench_args.out_prefix,
                    "output prefix (default bench_)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed())
      return run_fit(fit_args);
    if (eval->parsed())
      return run_eval(eval_args);
    if (sample->parsed())
      return run_sample(sample_args);
    if (summary->parsed())
      return run_summary(summary_model);
    if (measures->parsed())
      return run_measures(measures_model, measures_n, measures_seed);
    if (plot->parsed())
      return run_plot(plot_args);
    if (bench->parsed())
      return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
