#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcse/inference.hpp"
#include "mcse/rng.hpp"
#include "mcse/series.hpp"

namespace mcse {

using DesignMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Beta = Eigen::Vector3d;

/// Starting value for the Lupus chains (maximum likelihood estimate).
inline const Beta kLupusStart{-1.778, 4.374, 2.482};
/// Posterior means of the Lupus model from a 1e8-iteration reference run, and
/// their batch-means standard errors and asymptotic standard deviations.
inline const Beta kLupusReferenceMean{-3.0166, 6.9107, 3.9792};
inline const Beta kLupusReferenceMcse{1.18e-3, 2.26e-3, 1.47e-3};
inline const Beta kLupusReferenceSigma{11.85, 22.60, 14.74};
inline constexpr std::size_t kLupusRows = 55;

/// Probit regression Pr(Y_i = 1) = Phi(x_i' beta) with a flat prior on beta,
/// with rows x_i' = (1, x_i1, x_i2). Immutable after construction; caches
/// (X'X)^{-1}, (X'X)^{-1} X' and a lower Cholesky factor of (X'X)^{-1}.
class ProbitModel {
 public:
  /// `covariates` holds (x_i1, x_i2) per row; responses must be 0 or 1.
  ProbitModel(const Eigen::Matrix<double, Eigen::Dynamic, 2>& covariates, std::vector<int> responses);

  [[nodiscard]] std::size_t observations() const noexcept { return responses_.size(); }
  [[nodiscard]] const DesignMatrix& design() const noexcept { return design_; }
  [[nodiscard]] const std::vector<int>& responses() const noexcept { return responses_; }
  [[nodiscard]] const Eigen::Matrix3d& xtx_inverse() const noexcept { return xtx_inv_; }
  [[nodiscard]] const Eigen::Matrix<double, 3, Eigen::Dynamic>& projector() const noexcept { return projector_; }
  [[nodiscard]] const Eigen::Matrix3d& inverse_factor() const noexcept { return inv_factor_; }

 private:
  DesignMatrix design_;
  std::vector<int> responses_;
  Eigen::Matrix3d xtx_inv_;
  Eigen::Matrix<double, 3, Eigen::Dynamic> projector_;
  Eigen::Matrix3d inv_factor_;
};

/// Reads a CSV with header `y,x1,x2`. When expected_rows is set the row count
/// must match exactly.
[[nodiscard]] ProbitModel load_probit_csv(const std::string& path,
                                          std::optional<std::size_t> expected_rows = std::nullopt);

/// How Gamma(a, c) in the scale step is read: c as a rate (mean a / c) or as
/// a scale (mean a c).
enum class GammaReading { ShapeRate, ShapeScale };

/// Step 2: g^2 ~ Gamma(N/2, (1/2) RSS(z)), returned as g^2. Consumes one gamma draw.
[[nodiscard]] double pxda_scale_draw(const ProbitModel& model, const Eigen::VectorXd& z, RngStream& rng,
                                     GammaReading reading = GammaReading::ShapeRate);

/// Step 3: beta' ~ N((X'X)^{-1} X' z', (X'X)^{-1}). Consumes three standard normals.
[[nodiscard]] Beta pxda_regression_draw(const ProbitModel& model, const Eigen::VectorXd& z_prime, RngStream& rng);

/// Residual sum of squares of z after projection onto the columns of X.
[[nodiscard]] double residual_sum_squares(const ProbitModel& model, const Eigen::VectorXd& z);

/// One PX-DA update beta -> beta'. Draw order from `rng`: one truncated normal
/// per observation (in row order), one gamma, three standard normals.
///   1. z_i ~ TN(x_i' beta, 1, y_i)
///   2. g^2 ~ Gamma(N/2, (1/2) sum_i (z_i - x_i'(X'X)^{-1} X' z)^2), z' = g z
///   3. beta' ~ N((X'X)^{-1} X' z', (X'X)^{-1})
/// Step 1 is redrawn in the probability-zero event of a zero residual sum.
[[nodiscard]] Beta pxda_step(const Beta& beta, const ProbitModel& model, RngStream& rng,
                             GammaReading reading = GammaReading::ShapeRate);

class PxdaSampler final : public IncrementalSampler {
 public:
  PxdaSampler(const ProbitModel& model, const Beta& start, RngStream rng,
              GammaReading reading = GammaReading::ShapeRate);

  [[nodiscard]] std::size_t dimension() const override { return 3; }
  void extend(std::size_t steps, std::vector<std::vector<double>>& history) override;

  const Beta& next();

 private:
  const ProbitModel* model_;
  Beta state_;
  RngStream rng_;
  GammaReading reading_;
};

/// n PX-DA iterations from beta0; one series per coordinate of beta.
[[nodiscard]] std::array<SampleSeries, 3> pxda_chain(const ProbitModel& model, const Beta& beta0, std::size_t n,
                                                     std::uint64_t seed, std::uint64_t stream = 0,
                                                     GammaReading reading = GammaReading::ShapeRate);

/// Synthetic data set: covariates iid N(0, 1), responses Bernoulli(Phi(x' beta_true)).
/// Redrawn until X has full column rank and both response classes occur.
[[nodiscard]] ProbitModel synth_probit(std::size_t n_obs, const Beta& beta_true, std::uint64_t seed);

}  // namespace mcse
