#include "copulakde/model_io.hpp"

#include "copulakde/csv.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace ckde {
namespace io {

using nlohmann::json;

static std::string
enc(double x)
{
  return csv::format_full(x);
}

static double
dec(const json& j, const char* what)
{
  if (!j.is_string())
    throw std::runtime_error(std::string("model file: field '") + what +
                             "' must be a decimal string");
  const std::string& s = j.get_ref<const std::string&>();
  char* end = nullptr;
  double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || (end && *end != '\0'))
    throw std::runtime_error(std::string("model file: bad number in '") +
                             what + "'");
  return value;
}

static json
enc_matrix2(const Eigen::Matrix2d& m)
{
  // row-major
  return json::array(
    { enc(m(0, 0)), enc(m(0, 1)), enc(m(1, 0)), enc(m(1, 1)) });
}

static Eigen::Matrix2d
dec_matrix2(const json& j, const char* what)
{
  if (!j.is_array() || j.size() != 4)
    throw std::runtime_error(std::string("model file: field '") + what +
                             "' must hold 4 entries");
  Eigen::Matrix2d m;
  m(0, 0) = dec(j[0], what);
  m(0, 1) = dec(j[1], what);
  m(1, 0) = dec(j[2], what);
  m(1, 1) = dec(j[3], what);
  return m;
}

void
save_model(const FittedCopula& model, const std::string& path)
{
  json root;
  root["magic"] = model_magic;
  root["format_version"] = model_format_version;
  root["method"] = method_to_string(model.method());
  root["n"] = model.nobs();
  root["renorm_iters"] = model.renorm_iters();
  root["loglik"] = enc(model.loglik());
  root["edf"] = enc(model.edf());

  const Bandwidth& bw = model.bandwidth();
  json jbw;
  jbw["mult"] = enc(bw.mult);
  switch (model.method()) {
    case Method::mr:
    case Method::beta:
      jbw["scalar"] = enc(bw.scalar);
      break;
    case Method::t:
    case Method::tll1:
    case Method::tll2:
      jbw["matrix"] = enc_matrix2(bw.matrix);
      break;
    default:
      jbw["nn_alpha"] = enc(bw.nn_alpha);
      jbw["nn_shape"] = enc_matrix2(bw.nn_shape);
      break;
  }
  root["bandwidth"] = jbw;

  const Eigen::VectorXd& knots = model.field().knots();
  const Eigen::MatrixXd& values = model.field().values();
  json jknots = json::array();
  for (Eigen::Index j = 0; j < knots.size(); ++j)
    jknots.push_back(enc(knots(j)));
  root["knots"] = jknots;

  json jvalues = json::array();
  for (Eigen::Index j = 0; j < values.rows(); ++j)
    for (Eigen::Index k = 0; k < values.cols(); ++k)
      jvalues.push_back(enc(values(j, k)));
  root["values"] = jvalues;

  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  out << root.dump(1) << '\n';
  if (!out)
    throw std::runtime_error("failed writing '" + path + "'");
}

FittedCopula
load_model(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "' for reading");
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file '" + path +
                             "' is not valid JSON: " + e.what());
  }

  if (!root.contains("magic") || root["magic"] != model_magic)
    throw std::runtime_error("'" + path + "' is not a model file");
  if (!root.contains("format_version") ||
      !root["format_version"].is_number_integer() ||
      root["format_version"].get<int>() != model_format_version) {
    throw std::runtime_error("model file '" + path +
                             "' has an unsupported format_version");
  }

  try {
    Method method = method_from_string(root.at("method").get<std::string>());
    Eigen::Index n = root.at("n").get<Eigen::Index>();
    int renorm_iters = root.at("renorm_iters").get<int>();
    double loglik = dec(root.at("loglik"), "loglik");
    double edf = dec(root.at("edf"), "edf");

    const json& jbw = root.at("bandwidth");
    Bandwidth bw;
    bw.mult = dec(jbw.at("mult"), "mult");
    switch (method) {
      case Method::mr:
      case Method::beta:
        bw.scalar = dec(jbw.at("scalar"), "scalar");
        break;
      case Method::t:
      case Method::tll1:
      case Method::tll2:
        bw.matrix = dec_matrix2(jbw.at("matrix"), "matrix");
        break;
      default:
        bw.nn_alpha = dec(jbw.at("nn_alpha"), "nn_alpha");
        bw.nn_shape = dec_matrix2(jbw.at("nn_shape"), "nn_shape");
        break;
    }

    const json& jknots = root.at("knots");
    Eigen::VectorXd knots(jknots.size());
    for (std::size_t j = 0; j < jknots.size(); ++j)
      knots(static_cast<Eigen::Index>(j)) = dec(jknots[j], "knots");

    const json& jvalues = root.at("values");
    Eigen::Index m = knots.size();
    if (static_cast<Eigen::Index>(jvalues.size()) != m * m)
      throw std::runtime_error("model file: values/knots size mismatch");
    Eigen::MatrixXd values(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        values(j, k) =
          dec(jvalues[static_cast<std::size_t>(j * m + k)], "values");

    return FittedCopula(method, bw, interp::SplineField(knots, values), n,
                        loglik, edf, renorm_iters);
  } catch (const json::exception& e) {
    throw std::runtime_error("model file '" + path +
                             "' is corrupt: " + e.what());
  }
}

} // namespace io
} // namespace ckde
