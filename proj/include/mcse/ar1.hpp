#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mcse/inference.hpp"
#include "mcse/rng.hpp"
#include "mcse/series.hpp"

namespace mcse {

/// X_i = rho X_{i-1} + e_i with e_i iid N(0, 1), started from X_0 = x0. With no
/// x0 the start is drawn from the stationary law N(0, 1/(1 - rho^2)).
struct Ar1Config {
  double rho = 0.5;
  std::size_t n = 1000;
  std::optional<double> x0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Closed-form moments of the stationary AR(1) chain.
struct Ar1Truth {
  double rho = 0.0;
  double stationary_var = 1.0;  // 1/(1 - rho^2)
  double sigma2 = 1.0;          // sum over all lags: 1/(1 - rho)^2
  double gamma_const = 0.0;     // -2 sum_{s>=1} s gamma(s) = -2 rho / ((1 - rho^2)(1 - rho)^2)

  [[nodiscard]] double autocov(std::size_t lag) const;
};

[[nodiscard]] Ar1Truth ar1_truth(double rho);

[[nodiscard]] SampleSeries ar1_chain(const Ar1Config& cfg);

/// Incremental AR(1) for the fixed-width driver; its output is a prefix-
/// consistent continuation of ar1_chain with the same seed and stream.
class Ar1Sampler final : public IncrementalSampler {
 public:
  Ar1Sampler(double rho, std::optional<double> x0, RngStream rng);

  [[nodiscard]] std::size_t dimension() const override { return 1; }
  void extend(std::size_t steps, std::vector<std::vector<double>>& history) override;

  double next();

 private:
  double rho_;
  double state_;
  RngStream rng_;
};

}  // namespace mcse
