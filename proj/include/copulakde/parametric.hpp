#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace ckde {
namespace bench {

enum class Family
{
  independence,
  gaussian,
  gumbel,
  clayton,
  frank,
  student_t
};

Family family_from_string(const std::string& name);
std::string family_to_string(Family family);

//! Kendall's tau to the family parameter: elliptical rho = sin(pi tau / 2),
//! Gumbel theta = 1 / (1 - tau), Clayton theta = 2 tau / (1 - tau), Frank
//! theta by inverting the Debye-function relation numerically.
double tau_to_param(Family family, double tau);

//! Closed-form copula with density, cdf and a seeded sampler; the ground
//! truth for the simulation study.
class ParametricCopula
{
public:
  ParametricCopula(Family family, double param);

  static ParametricCopula from_tau(Family family, double tau);

  Family family() const { return family_; }
  double param() const { return param_; }

  double pdf(double u, double v) const;
  double cdf(double u, double v) const;
  Eigen::MatrixX2d sample(Eigen::Index n, std::uint64_t seed) const;

private:
  Family family_;
  double param_; // rho for elliptical, theta for Archimedean
  static constexpr double nu_ = 3.0; // Student t degrees of freedom
};

} // namespace bench
} // namespace ckde
