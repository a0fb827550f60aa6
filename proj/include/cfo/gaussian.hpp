#pragma once

#include <limits>

namespace cfo {

// Scalar Gaussian in information form: precision (1/Hz^2) and precision-weighted
// mean. Precision 0 is the flat (uninformative) density and always carries a
// zero weighted mean.
class InfoGaussian {
 public:
  constexpr InfoGaussian() = default;

  static constexpr InfoGaussian flat() { return {}; }
  static InfoGaussian from_info(double precision, double weighted_mean);
  static InfoGaussian from_moments(double mean, double variance);

  constexpr double precision() const noexcept { return precision_; }
  constexpr double weighted_mean() const noexcept { return weighted_mean_; }
  constexpr bool is_flat() const noexcept { return precision_ == 0.0; }

  // Throws InvalidArgument on a flat density.
  double mean() const;
  double variance() const noexcept {
    return precision_ > 0.0 ? 1.0 / precision_ : std::numeric_limits<double>::infinity();
  }

  // Product of densities (normalisation dropped).
  friend InfoGaussian operator*(const InfoGaussian& a, const InfoGaussian& b) noexcept {
    InfoGaussian out;
    out.precision_ = a.precision_ + b.precision_;
    out.weighted_mean_ = a.weighted_mean_ + b.weighted_mean_;
    return out;
  }
  InfoGaussian& operator*=(const InfoGaussian& o) noexcept { return *this = *this * o; }

  friend bool operator==(const InfoGaussian&, const InfoGaussian&) = default;

 private:
  double precision_ = 0.0;
  double weighted_mean_ = 0.0;
};

// Density over f_i obtained by maximising (equivalently, marginalising)
//   N(r; f_i + f_j, sigma2) * g(f_j)
// over f_j: mean r - mean(g), variance sigma2 + var(g). Flat g stays flat.
InfoGaussian sum_max_marginal(double r, double sigma2, const InfoGaussian& g);

}  // namespace cfo
