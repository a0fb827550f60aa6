#include "cfo/gaussian.hpp"

#include <cmath>
#include <string>

#include "cfo/errors.hpp"

namespace cfo {

InfoGaussian InfoGaussian::from_info(double precision, double weighted_mean) {
  if (!(precision >= 0.0) || !std::isfinite(precision)) {
    throw InvalidArgument("precision must be finite and non-negative");
  }
  if (!std::isfinite(weighted_mean)) throw InvalidArgument("weighted mean must be finite");
  InfoGaussian g;
  g.precision_ = precision;
  g.weighted_mean_ = precision == 0.0 ? 0.0 : weighted_mean;
  return g;
}

InfoGaussian InfoGaussian::from_moments(double mean, double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  if (std::isinf(variance)) return flat();
  const double precision = 1.0 / variance;
  return from_info(precision, precision * mean);
}

double InfoGaussian::mean() const {
  if (is_flat()) throw InvalidArgument("mean of a flat density is undefined");
  return weighted_mean_ / precision_;
}

InfoGaussian sum_max_marginal(double r, double sigma2, const InfoGaussian& g) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be positive");
  if (g.is_flat()) return InfoGaussian::flat();
  const double precision = g.precision() / (1.0 + g.precision() * sigma2);
  return InfoGaussian::from_info(precision, precision * (r - g.mean()));
}

}  // namespace cfo
