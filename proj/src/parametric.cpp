#include "copulakde/parametric.hpp"

#include "copulakde/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ckde {
namespace bench {

static constexpr double pi = 3.14159265358979323846;

Family
family_from_string(const std::string& name)
{
  std::string s;
  for (char c : name)
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "independence" || s == "indep")
    return Family::independence;
  if (s == "gaussian" || s == "normal")
    return Family::gaussian;
  if (s == "gumbel")
    return Family::gumbel;
  if (s == "clayton")
    return Family::clayton;
  if (s == "frank")
    return Family::frank;
  if (s == "student_t" || s == "student" || s == "student-t")
    return Family::student_t;
  throw std::invalid_argument(
    "unknown copula family '" + name +
    "' (expected independence, gaussian, gumbel, clayton, frank, student_t)");
}

std::string
family_to_string(Family family)
{
  switch (family) {
    case Family::independence:
      return "independence";
    case Family::gaussian:
      return "gaussian";
    case Family::gumbel:
      return "gumbel";
    case Family::clayton:
      return "clayton";
    case Family::frank:
      return "frank";
    default:
      return "student_t";
  }
}

// first Debye function, (1/x) * int_0^x t / (e^t - 1) dt
static double
debye1(double x)
{
  auto [nodes, weights] = stats::gauss_legendre(64, 0.0, x);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    double t = nodes(i);
    double f = (t < 1e-10) ? 1.0 - 0.5 * t : t / std::expm1(t);
    acc += weights(i) * f;
  }
  return acc / x;
}

static double
frank_tau(double theta)
{
  return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
}

double
tau_to_param(Family family, double tau)
{
  auto require = [&](bool ok, const char* range) {
    if (!ok) {
      std::ostringstream msg;
      msg << "tau_to_param: tau = " << tau << " outside " << range << " for "
          << family_to_string(family);
      throw std::invalid_argument(msg.str());
    }
  };
  switch (family) {
    case Family::independence:
      require(tau == 0.0, "{0}");
      return 0.0;
    case Family::gaussian:
    case Family::student_t:
      require(tau > -1.0 && tau < 1.0, "(-1, 1)");
      return std::sin(0.5 * pi * tau);
    case Family::gumbel:
      require(tau > 0.0 && tau < 1.0, "(0, 1)");
      return 1.0 / (1.0 - tau);
    case Family::clayton:
      require(tau > 0.0 && tau < 1.0, "(0, 1)");
      return 2.0 * tau / (1.0 - tau);
    case Family::frank: {
      require(tau > 0.0 && tau < 1.0, "(0, 1)");
      double lo = 1e-6, hi = 500.0;
      for (int iter = 0; iter < 80; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (frank_tau(mid) < tau)
          lo = mid;
        else
          hi = mid;
        if (hi - lo < 1e-10)
          break;
      }
      return 0.5 * (lo + hi);
    }
  }
  throw std::logic_error("tau_to_param: unreachable");
}

// Student t distribution with nu degrees of freedom

static double
t_pdf(double x, double nu)
{
  double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
             std::sqrt(nu * pi);
  return c * std::pow(1.0 + x * x / nu, -0.5 * (nu + 1.0));
}

static double
t_cdf(double x, double nu)
{
  if (std::isinf(x))
    return x > 0 ? 1.0 : 0.0;
  double p = 0.5 * stats::inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x >= 0.0 ? 1.0 - p : p;
}

static double
t_quantile(double p, double nu)
{
  if (p <= 0.0)
    return -std::numeric_limits<double>::infinity();
  if (p >= 1.0)
    return std::numeric_limits<double>::infinity();
  double lo = -1e12, hi = 1e12;
  double x = stats::qnorm(p);
  for (int iter = 0; iter < 100; ++iter) {
    double f = t_cdf(x, nu) - p;
    if (f > 0.0)
      hi = std::min(hi, x);
    else
      lo = std::max(lo, x);
    double step = f / std::max(t_pdf(x, nu), 1e-300);
    double next = x - step;
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-13 * (1.0 + std::fabs(next))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

static double
clamped_qnorm(double u)
{
  static const double lo = stats::pnorm(-8.2);
  static const double hi = stats::pnorm(8.2);
  return stats::qnorm(std::clamp(u, lo, hi));
}

ParametricCopula::ParametricCopula(Family family, double param)
  : family_(family)
  , param_(param)
{
  auto fail = [&](const char* bound) {
    std::ostringstream msg;
    msg << "ParametricCopula: parameter " << param << " violates " << bound
        << " for " << family_to_string(family);
    throw std::invalid_argument(msg.str());
  };
  switch (family_) {
    case Family::independence:
      break;
    case Family::gaussian:
    case Family::student_t:
      if (!(param > -1.0 && param < 1.0))
        fail("rho in (-1, 1)");
      break;
    case Family::gumbel:
      if (!(param >= 1.0))
        fail("theta >= 1");
      break;
    case Family::clayton:
      if (!(param > 0.0))
        fail("theta > 0");
      break;
    case Family::frank:
      if (param == 0.0)
        fail("theta != 0");
      break;
  }
}

ParametricCopula
ParametricCopula::from_tau(Family family, double tau)
{
  return ParametricCopula(family, tau_to_param(family, tau));
}

double
ParametricCopula::pdf(double u, double v) const
{
  u = std::clamp(u, 1e-12, 1.0 - 1e-12);
  v = std::clamp(v, 1e-12, 1.0 - 1e-12);
  switch (family_) {
    case Family::independence:
      return 1.0;
    case Family::gaussian: {
      double rho = param_;
      double x = clamped_qnorm(u), y = clamped_qnorm(v);
      double r2 = 1.0 - rho * rho;
      double e = -(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) /
                 (2.0 * r2);
      return std::exp(e) / std::sqrt(r2);
    }
    case Family::gumbel: {
      double theta = param_;
      double lx = -std::log(u), ly = -std::log(v);
      double s = std::pow(lx, theta) + std::pow(ly, theta);
      double s_inv = std::pow(s, 1.0 / theta);
      double log_c = -s_inv + (theta - 1.0) * (std::log(lx) + std::log(ly)) -
                     std::log(u) - std::log(v) +
                     (2.0 / theta - 2.0) * std::log(s) +
                     std::log1p((theta - 1.0) / s_inv);
      return std::exp(log_c);
    }
    case Family::clayton: {
      double theta = param_;
      double g = std::pow(u, -theta) + std::pow(v, -theta) - 1.0;
      return (1.0 + theta) * std::pow(u * v, -theta - 1.0) *
             std::pow(g, -1.0 / theta - 2.0);
    }
    case Family::frank: {
      double theta = param_;
      double em = -std::expm1(-theta); // 1 - e^{-theta}
      double d = em - (-std::expm1(-theta * u)) * (-std::expm1(-theta * v));
      return theta * em * std::exp(-theta * (u + v)) / (d * d);
    }
    case Family::student_t: {
      double rho = param_;
      double x = t_quantile(u, nu_), y = t_quantile(v, nu_);
      double r2 = 1.0 - rho * rho;
      double q = (x * x - 2.0 * rho * x * y + y * y) / (nu_ * r2);
      double f2 = std::pow(1.0 + q, -0.5 * (nu_ + 2.0)) /
                  (2.0 * pi * std::sqrt(r2));
      return f2 / (t_pdf(x, nu_) * t_pdf(y, nu_));
    }
  }
  throw std::logic_error("pdf: unreachable");
}

double
ParametricCopula::cdf(double u, double v) const
{
  if (std::isnan(u) || std::isnan(v) || u < 0.0 || u > 1.0 || v < 0.0 ||
      v > 1.0)
    throw std::domain_error("ParametricCopula::cdf: point outside [0, 1]^2");
  if (u == 0.0 || v == 0.0)
    return 0.0;
  if (u == 1.0)
    return v;
  if (v == 1.0)
    return u;
  switch (family_) {
    case Family::independence:
      return u * v;
    case Family::gaussian: {
      double rho = param_;
      double x = clamped_qnorm(u), y = clamped_qnorm(v);
      auto [nodes, weights] = stats::gauss_legendre(32, 0.0, rho);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < nodes.size(); ++i) {
        double r = nodes(i);
        double r2 = 1.0 - r * r;
        acc += weights(i) *
               std::exp(-(x * x - 2.0 * r * x * y + y * y) / (2.0 * r2)) /
               std::sqrt(r2);
      }
      return std::clamp(u * v + acc / (2.0 * pi), 0.0, 1.0);
    }
    case Family::gumbel: {
      double theta = param_;
      double s = std::pow(-std::log(u), theta) + std::pow(-std::log(v), theta);
      return std::exp(-std::pow(s, 1.0 / theta));
    }
    case Family::clayton: {
      double theta = param_;
      double g = std::pow(u, -theta) + std::pow(v, -theta) - 1.0;
      return std::pow(g, -1.0 / theta);
    }
    case Family::frank: {
      double theta = param_;
      double num = std::expm1(-theta * u) * std::expm1(-theta * v);
      return -std::log1p(num / std::expm1(-theta)) / theta;
    }
    case Family::student_t: {
      // integrate the conditional cdf h(v | s) over s in [0, u]
      double rho = param_;
      double y = t_quantile(v, nu_);
      double r2 = 1.0 - rho * rho;
      double acc = 0.0;
      for (int panel = 0; panel < 4; ++panel) {
        double a = u * panel / 4.0, b = u * (panel + 1) / 4.0;
        auto [nodes, weights] = stats::gauss_legendre(16, a, b);
        for (Eigen::Index i = 0; i < nodes.size(); ++i) {
          double x = t_quantile(nodes(i), nu_);
          double scale = std::sqrt((nu_ + 1.0) / ((nu_ + x * x) * r2));
          acc += weights(i) * t_cdf((y - rho * x) * scale, nu_ + 1.0);
        }
      }
      return std::clamp(acc, 0.0, 1.0);
    }
  }
  throw std::logic_error("cdf: unreachable");
}

Eigen::MatrixX2d
ParametricCopula::sample(Eigen::Index n, std::uint64_t seed) const
{
  if (n < 1)
    throw std::invalid_argument("sample: n must be positive");
  stats::Rng rng(seed);
  Eigen::MatrixX2d out(n, 2);
  switch (family_) {
    case Family::independence: {
      for (Eigen::Index i = 0; i < n; ++i) {
        out(i, 0) = rng.uniform();
        out(i, 1) = rng.uniform();
      }
      break;
    }
    case Family::gaussian: {
      double rho = param_;
      double s = std::sqrt(1.0 - rho * rho);
      for (Eigen::Index i = 0; i < n; ++i) {
        double z1 = rng.normal(), z2 = rng.normal();
        out(i, 0) = stats::pnorm(z1);
        out(i, 1) = stats::pnorm(rho * z1 + s * z2);
      }
      break;
    }
    case Family::gumbel: {
      double theta = param_;
      if (theta < 1.0 + 1e-9) {
        for (Eigen::Index i = 0; i < n; ++i) {
          out(i, 0) = rng.uniform();
          out(i, 1) = rng.uniform();
        }
        break;
      }
      double alpha = 1.0 / theta;
      for (Eigen::Index i = 0; i < n; ++i) {
        // positive-stable frailty (Kanter's representation)
        double w = pi * std::max(rng.uniform(), 1e-12);
        double e0 = std::max(rng.exponential(), 1e-300);
        double frailty = std::sin(alpha * w) /
                         std::pow(std::sin(w), 1.0 / alpha) *
                         std::pow(std::sin((1.0 - alpha) * w) / e0,
                                  (1.0 - alpha) / alpha);
        double e1 = rng.exponential(), e2 = rng.exponential();
        out(i, 0) = std::exp(-std::pow(e1 / frailty, alpha));
        out(i, 1) = std::exp(-std::pow(e2 / frailty, alpha));
      }
      break;
    }
    case Family::clayton: {
      double theta = param_;
      for (Eigen::Index i = 0; i < n; ++i) {
        double frailty = std::max(rng.gamma(1.0 / theta), 1e-300);
        double e1 = rng.exponential(), e2 = rng.exponential();
        out(i, 0) = std::pow(1.0 + e1 / frailty, -1.0 / theta);
        out(i, 1) = std::pow(1.0 + e2 / frailty, -1.0 / theta);
      }
      break;
    }
    case Family::frank: {
      double theta = param_;
      for (Eigen::Index i = 0; i < n; ++i) {
        double u = rng.uniform();
        double w = rng.uniform();
        double a = std::exp(-theta * u);
        double denom = a + w * (1.0 - a);
        double num = a * (1.0 - w) + w * std::exp(-theta);
        out(i, 0) = u;
        out(i, 1) = -(std::log(num) - std::log(denom)) / theta;
      }
      break;
    }
    case Family::student_t: {
      double rho = param_;
      double s = std::sqrt(1.0 - rho * rho);
      for (Eigen::Index i = 0; i < n; ++i) {
        double z1 = rng.normal(), z2 = rng.normal();
        double g = std::sqrt(std::max(rng.chisq(nu_), 1e-300) / nu_);
        out(i, 0) = t_cdf(z1 / g, nu_);
        out(i, 1) = t_cdf((rho * z1 + s * z2) / g, nu_);
      }
      break;
    }
  }
  // keep samples strictly inside the open square
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < 2; ++c)
      out(i, c) = std::clamp(out(i, c), 1e-12, 1.0 - 1e-12);
  }
  return out;
}

} // namespace bench
} // namespace ckde
