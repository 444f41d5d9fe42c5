#pragma once

#include <functional>
#include <span>

#include "eiginf/matcore.hpp"

namespace eiginf {

struct Distribution {
  enum class Kind { ChiSquare, StdNormal };
  Kind kind = Kind::StdNormal;
  Index df = 1;

  static Distribution chi2(Index df);
  static Distribution std_normal() { return {}; }
};

// P(X > x).
double tail_probability(double x, const Distribution& dist);
double cdf(double x, const Distribution& dist);
// Upper quantile: the x with P(X > x) = upper.
double upper_quantile(double upper, const Distribution& dist);

// Kolmogorov-Smirnov distance sup |F_n - F| of the empirical law of draws.
double ks_distance(std::span<const double> draws, const std::function<double(double)>& cdf_fn);

}  // namespace eiginf
