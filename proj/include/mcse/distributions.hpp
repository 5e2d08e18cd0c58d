#pragma once

#include "mcse/rng.hpp"

namespace mcse {

/// Standard normal CDF and its inverse.
[[nodiscard]] double normal_cdf(double x);
[[nodiscard]] double normal_quantile(double p);

/// One draw from N(mu, 1) conditioned to be > 0 (positive = true) or < 0.
///
/// Inverse CDF on the tail probability when the truncation point sits within
/// five standard deviations of the mean; exponential-proposal rejection
/// (Robert 1995) deeper in the tail. Output sign always matches `positive`.
/// Throws std::domain_error when mu is not finite.
[[nodiscard]] double truncated_normal(double mu, bool positive, RngStream& rng);

}  // namespace mcse
