#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcse/estimators.hpp"

namespace mcse {

/// Two-sided Student t quantile q with P(|T_dof| <= q) = level.
[[nodiscard]] double t_quantile(double level, std::int64_t dof);

/// a - 1 for BM (a = floor(n/b)); n - b for OBM, partial OBM and every
/// spectral window. Throws std::domain_error when the result is < 1.
[[nodiscard]] std::size_t dof_for(const Method& method, std::size_t n, std::size_t b);

struct ConfidenceInterval {
  double center = 0.0;
  double halfwidth = 0.0;
  double level = 0.95;
  std::size_t dof = 1;

  [[nodiscard]] double lower() const noexcept { return center - halfwidth; }
  [[nodiscard]] double upper() const noexcept { return center + halfwidth; }
  [[nodiscard]] bool covers(double x) const noexcept { return lower() <= x && x <= upper(); }
};

/// mean +- t_{level, dof} sqrt(value / n). Throws IndefiniteVarianceError for
/// a negative estimate.
[[nodiscard]] ConfidenceInterval interval(double mean, const VarianceEstimate& est, double level);

/// Per-interval level for m simultaneous intervals: 1 - (1 - overall)/m.
[[nodiscard]] double bonferroni_level(double overall, std::size_t m);

/// Where the first stopping check lands after the minimum effort n*.
enum class FirstCheck {
  AfterGrowth,       // simulate n*, grow once, check at ceil(growth n*)
  JustPastMinimum,   // check at n* + 1, then grow
};

struct StoppingConfig {
  double epsilon = 0.1;            // target half-width
  std::size_t n_star = 1000;       // minimum simulation effort
  double growth = 1.10;            // n <- ceil(growth n) between checks
  double level = 0.95;             // overall nominal level
  std::size_t bonferroni = 1;      // number of simultaneous intervals sharing `level`
  std::size_t n_max = 100'000'000; // hard cap on iterations
  FirstCheck first_check = FirstCheck::AfterGrowth;

  void validate() const;
  /// Level each individual interval is built at.
  [[nodiscard]] double interval_level() const { return bonferroni_level(level, bonferroni); }
};

/// max(halfwidths) + epsilon I(n <= n*) + 1/n <= epsilon. A NaN half-width
/// marks an indefinite coordinate and makes the check fail.
[[nodiscard]] bool stop_check(std::span<const double> halfwidths, std::size_t n, const StoppingConfig& cfg);

/// A chain that can be extended one block at a time. History holds one
/// vector per coordinate and is only ever appended to.
class IncrementalSampler {
 public:
  virtual ~IncrementalSampler() = default;
  [[nodiscard]] virtual std::size_t dimension() const = 0;
  virtual void extend(std::size_t steps, std::vector<std::vector<double>>& history) = 0;
};

struct EstimatorConfig {
  Method method = Method::bm();
  BatchPolicy policy = BatchPolicy::power_law(0.5);
};

struct TrajectoryPoint {
  std::size_t n = 0;
  double max_halfwidth = 0.0;  // NaN when some coordinate was indefinite
};

struct FixedWidthResult {
  std::size_t terminal_n = 0;
  std::vector<ConfidenceInterval> intervals;
  std::vector<VarianceEstimate> estimates;
  std::size_t checks = 0;
  std::vector<TrajectoryPoint> trajectory;
};

/// Runs the sampler to n*, then checks the stopping rule and grows the run
/// by the growth factor until it holds. Throws BudgetExceededError when the
/// next step would pass n_max.
[[nodiscard]] FixedWidthResult run_fixed_width(IncrementalSampler& chain, const EstimatorConfig& est,
                                               const StoppingConfig& cfg, bool record_trajectory = false);

}  // namespace mcse
