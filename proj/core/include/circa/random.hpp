#ifndef CIRCA_RANDOM_HPP
#define CIRCA_RANDOM_HPP

#include <cstdint>
#include <random>

#include "circa/numerics.hpp"

namespace circa {

/// Portable seeded source.
///
/// Engine: std::mt19937_64 (its output sequence is fixed by the standard).
/// uniform(): (u >> 11) * 2^-53, in [0, 1).
/// normal(): Box-Muller cosine branch, sqrt(-2 ln(1 - u1)) cos(2 pi u2),
/// consuming two uniforms per draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// Uniform integer in [lo, hi].
  long long uniform_int(long long lo, long long hi);

  Vector gaussian_vector(Eigen::Index n);
  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniform point of the unit sphere in R^n.
  Vector unit_sphere(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace circa

#endif  // CIRCA_RANDOM_HPP
