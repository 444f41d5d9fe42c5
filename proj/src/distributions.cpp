#include "eiginf/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace eiginf {

Distribution Distribution::chi2(Index df) {
  if (df < 1) throw InvalidArgumentError("chi2: degrees of freedom must be >= 1");
  return Distribution{Kind::ChiSquare, df};
}

double tail_probability(double x, const Distribution& dist) {
  if (!std::isfinite(x)) throw InvalidArgumentError("tail_probability: x must be finite");
  if (dist.kind == Distribution::Kind::StdNormal) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
  }
  if (dist.df < 1) throw InvalidArgumentError("tail_probability: df must be >= 1");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dist.df), 0.5 * x);
}

double cdf(double x, const Distribution& dist) {
  if (dist.kind == Distribution::Kind::StdNormal) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
  }
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * static_cast<double>(dist.df), 0.5 * x);
}

double upper_quantile(double upper, const Distribution& dist) {
  if (!(upper > 0.0 && upper < 1.0)) {
    throw InvalidArgumentError("upper_quantile: probability must lie in (0, 1)");
  }
  if (dist.kind == Distribution::Kind::StdNormal) {
    return boost::math::quantile(boost::math::complement(boost::math::normal(), upper));
  }
  const boost::math::chi_squared chi(static_cast<double>(dist.df));
  return boost::math::quantile(boost::math::complement(chi, upper));
}

double ks_distance(std::span<const double> draws, const std::function<double(double)>& cdf_fn) {
  if (draws.empty()) throw InvalidArgumentError("ks_distance: no draws");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf_fn(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace eiginf
