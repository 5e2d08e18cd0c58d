#include "mcse/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace mcse {

namespace {

constexpr double kInverseCdfLimit = 5.0;

// Z - t for Z ~ N(0, 1) conditioned on Z > t. Returning the excess keeps
// mu + Z from cancelling to zero when |mu| is huge.
double truncated_excess(double t, RngStream& rng) {
  if (t <= kInverseCdfLimit) {
    const double tail = normal_cdf(-t);  // P(Z > t)
    while (true) {
      const double z = -normal_quantile(rng.uniform() * tail);
      if (z > t) return z - t;
    }
  }
  const double root = std::hypot(t, 2.0);
  const double rate = 0.5 * (t + root);
  const double offset = -2.0 / (t + root);  // t - rate without cancellation
  while (true) {
    const double x = rng.exponential() / rate;
    const double d = offset + x;
    if (x > 0.0 && rng.uniform() <= std::exp(-0.5 * d * d)) return x;
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

double truncated_normal(double mu, bool positive, RngStream& rng) {
  if (!std::isfinite(mu)) throw std::domain_error("truncated_normal: mean is not finite");
  // X = mu + Z > 0  <=>  Z > -mu, and then X = Z - (-mu); the negative case mirrors it.
  if (positive) return truncated_excess(-mu, rng);
  return -truncated_excess(mu, rng);
}

}  // namespace mcse
