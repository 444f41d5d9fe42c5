#pragma once

// Random instances shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>

#include "eiginf/matcore.hpp"

namespace eiginf::fixtures {

inline Mat gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> z;
  Mat out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = z(rng);
  }
  return out;
}

inline Mat random_orthogonal(std::mt19937_64& rng, Index p) {
  Eigen::HouseholderQR<Mat> qr(gaussian(rng, p, p));
  return qr.householderQ() * Mat::Identity(p, p);
}

// Real block-diagonal spectrum with distinct moduli (pairs share theirs),
// conjugated by a basis of condition number at most 4.
inline Mat random_diagonalizable(std::mt19937_64& rng, Index p, double pair_fraction = 0.35) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> moduli;
  for (Index i = 0; i < p; ++i) moduli.push_back(0.3 + 0.2 * static_cast<double>(i) + 0.1 * u(rng));
  std::shuffle(moduli.begin(), moduli.end(), rng);
  Mat lambda = Mat::Zero(p, p);
  Index filled = 0, slot = 0;
  while (filled < p) {
    const double r = moduli[static_cast<std::size_t>(slot++)];
    if (p - filled >= 2 && u(rng) < pair_fraction) {
      const double theta = 0.3 + 2.5 * u(rng);
      lambda(filled, filled) = lambda(filled + 1, filled + 1) = r * std::cos(theta);
      lambda(filled, filled + 1) = -r * std::sin(theta);
      lambda(filled + 1, filled) = r * std::sin(theta);
      filled += 2;
    } else {
      lambda(filled, filled) = u(rng) < 0.5 ? r : -r;
      filled += 1;
    }
  }
  Vec s(p);
  for (Index i = 0; i < p; ++i) s[i] = 0.5 + 1.5 * u(rng);
  const Mat v = random_orthogonal(rng, p) * s.asDiagonal() * random_orthogonal(rng, p);
  return v * lambda * v.inverse();
}

// Same, but the largest-modulus root is real and simple.
inline Mat random_real_dominant(std::mt19937_64& rng, Index p) {
  while (true) {
    Mat m = random_diagonalizable(rng, p);
    const Spectrum s = eig_nonsym(m);
    if (s.is_real(0)) return m;
  }
}

inline Mat random_pd(std::mt19937_64& rng, Index p, double ridge = 0.1) {
  const Mat a = gaussian(rng, p, p);
  return a * a.transpose() / static_cast<double>(p) + ridge * Mat::Identity(p, p);
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace eiginf::fixtures
