#include "copulakde/qmc.hpp"

#include "copulakde/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ckde {
namespace qmc {

double
radical_inverse(std::uint64_t i, unsigned base)
{
  double inv_base = 1.0 / static_cast<double>(base);
  double f = inv_base;
  double r = 0.0;
  while (i > 0) {
    r += static_cast<double>(i % base) * f;
    i /= base;
    f *= inv_base;
  }
  return r;
}

QuasiStream
QuasiStream::shifted(std::uint64_t seed)
{
  stats::Rng rng(seed);
  QuasiStream stream;
  stream.shift << rng.uniform(), rng.uniform();
  return stream;
}

Eigen::MatrixX2d
quasi_points(QuasiStream& stream, Eigen::Index k)
{
  if (k < 1)
    throw std::invalid_argument("quasi_points: k must be positive");
  Eigen::MatrixX2d pts(k, 2);
  for (Eigen::Index row = 0; row < k; ++row) {
    // index 0 maps to the first nonzero Halton point
    std::uint64_t i = stream.index + static_cast<std::uint64_t>(row) + 1;
    double u = radical_inverse(i, stream.base_u) + stream.shift(0);
    double v = radical_inverse(i, stream.base_v) + stream.shift(1);
    pts(row, 0) = u - std::floor(u);
    pts(row, 1) = v - std::floor(v);
  }
  stream.index += static_cast<std::uint64_t>(k);
  return pts;
}

} // namespace qmc
} // namespace ckde
