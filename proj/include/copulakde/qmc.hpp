#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace ckde {
namespace qmc {

//! van der Corput radical inverse of i in the given base.
double radical_inverse(std::uint64_t i, unsigned base);

//! Low-discrepancy stream of Halton points in [0, 1)^2 with a
//! Cranley-Patterson shift. Consecutive draws advance the index, so a
//! stream behaves like a random generator with reproducible state.
struct QuasiStream
{
  unsigned base_u = 2;
  unsigned base_v = 3;
  std::uint64_t index = 0;
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();

  //! stream whose shift is drawn from the seeded pseudo-generator.
  static QuasiStream shifted(std::uint64_t seed);
};

//! next k points of the stream (the stream index advances by k).
Eigen::MatrixX2d quasi_points(QuasiStream& stream, Eigen::Index k);

} // namespace qmc
} // namespace ckde
