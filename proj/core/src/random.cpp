#include "circa/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "circa/errors.hpp"

namespace circa {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

long long Rng::uniform_int(long long lo, long long hi) {
  if (hi < lo) throw PreconditionViolation("uniform_int: empty range");
  const auto width = static_cast<double>(hi - lo + 1);
  const auto offset = static_cast<long long>(std::floor(uniform() * width));
  return lo + std::min(offset, hi - lo);
}

Vector Rng::gaussian_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Matrix Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
  }
  return m;
}

Vector Rng::unit_sphere(Eigen::Index n) {
  if (n < 1) throw PreconditionViolation("unit_sphere: dimension must be >= 1");
  while (true) {
    Vector v = gaussian_vector(n);
    const double r = v.norm();
    if (r > 1e-12) return v / r;
  }
}

}  // namespace circa
