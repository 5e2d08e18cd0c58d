#include "mcse/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "mcse/errors.hpp"

namespace mcse {

double t_quantile(double level, std::int64_t dof) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("t_quantile: level must lie in (0, 1)");
  if (dof < 1) throw std::domain_error("t_quantile: degrees of freedom must be >= 1, got " + std::to_string(dof));
  const boost::math::students_t dist(static_cast<double>(dof));
  // Upper tail mass (1 - level)/2, taken through the complement for accuracy.
  return boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
}

std::size_t dof_for(const Method& method, std::size_t n, std::size_t b) {
  if (b < 1 || b > n) throw std::domain_error("dof_for: need 1 <= b <= n");
  const std::size_t dof = method.kind() == MethodKind::BM ? n / b - 1 : n - b;
  if (dof < 1) {
    throw std::domain_error("dof_for: " + method.label() + " with n = " + std::to_string(n) + ", b = " +
                            std::to_string(b) + " has no degrees of freedom");
  }
  return dof;
}

ConfidenceInterval interval(double mean, const VarianceEstimate& est, double level) {
  if (est.indefinite()) {
    throw IndefiniteVarianceError("indefinite variance estimate (" + std::to_string(est.value) + ") from " +
                                  est.method.label());
  }
  if (est.n < 1) throw std::domain_error("interval: estimate has n = 0");
  ConfidenceInterval ci;
  ci.center = mean;
  ci.level = level;
  ci.dof = est.dof;
  ci.halfwidth = t_quantile(level, static_cast<std::int64_t>(est.dof)) *
                 std::sqrt(est.value / static_cast<double>(est.n));
  return ci;
}

double bonferroni_level(double overall, std::size_t m) {
  if (!(overall > 0.0 && overall < 1.0)) throw std::domain_error("bonferroni_level: level must lie in (0, 1)");
  if (m < 1) throw std::domain_error("bonferroni_level: m must be >= 1");
  return 1.0 - (1.0 - overall) / static_cast<double>(m);
}

void StoppingConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("stopping: epsilon must be > 0");
  if (!(growth > 1.0) || !std::isfinite(growth)) throw std::invalid_argument("stopping: growth must be > 1");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("stopping: level must lie in (0, 1)");
  if (n_star < 1) throw std::invalid_argument("stopping: n* must be >= 1");
  if (bonferroni < 1) throw std::invalid_argument("stopping: bonferroni count must be >= 1");
  if (n_max < n_star) throw std::invalid_argument("stopping: n_max must be >= n*");
}

bool stop_check(std::span<const double> halfwidths, std::size_t n, const StoppingConfig& cfg) {
  if (halfwidths.empty()) throw std::invalid_argument("stop_check: no half-widths");
  if (n < 1) throw std::invalid_argument("stop_check: n must be >= 1");
  double widest = 0.0;
  for (const double h : halfwidths) {
    if (!(h >= 0.0)) return false;
    widest = std::max(widest, h);
  }
  const double penalty = (n <= cfg.n_star ? cfg.epsilon : 0.0) + 1.0 / static_cast<double>(n);
  return widest + penalty <= cfg.epsilon;
}

namespace {

std::size_t grow(std::size_t n, double factor) {
  // The relative slack keeps products like 1.1 * 1000 from rounding up past 1100.
  const double scaled = factor * static_cast<double>(n);
  const auto next = static_cast<std::size_t>(std::ceil(scaled - 1e-12 * scaled));
  return std::max(next, n + 1);
}

}  // namespace

FixedWidthResult run_fixed_width(IncrementalSampler& chain, const EstimatorConfig& est, const StoppingConfig& cfg,
                                 bool record_trajectory) {
  cfg.validate();
  const std::size_t dim = chain.dimension();
  if (dim < 1) throw std::invalid_argument("run_fixed_width: sampler has no coordinates");
  const double level = cfg.interval_level();

  std::vector<std::vector<double>> history(dim);
  chain.extend(cfg.n_star, history);
  std::size_t n = cfg.n_star;
  std::size_t target = cfg.first_check == FirstCheck::AfterGrowth ? grow(n, cfg.growth) : n + 1;

  FixedWidthResult result;
  while (true) {
    if (target > cfg.n_max) {
      throw BudgetExceededError("fixed-width run exceeded n_max = " + std::to_string(cfg.n_max) + " at n = " +
                                std::to_string(n));
    }
    chain.extend(target - n, history);
    n = target;

    std::vector<double> halfwidths(dim);
    std::vector<ConfidenceInterval> intervals(dim);
    std::vector<VarianceEstimate> estimates;
    estimates.reserve(dim);
    const std::size_t b = batch_size(est.policy, n);
    for (std::size_t j = 0; j < dim; ++j) {
      const SampleSeries series(history[j]);
      estimates.push_back(estimate(series, est.method, b));
      try {
        intervals[j] = interval(series.mean(), estimates.back(), level);
        halfwidths[j] = intervals[j].halfwidth;
      } catch (const IndefiniteVarianceError&) {
        halfwidths[j] = std::numeric_limits<double>::quiet_NaN();
      }
    }
    ++result.checks;
    const bool done = stop_check(halfwidths, n, cfg);
    if (record_trajectory) {
      double widest = 0.0;
      for (const double h : halfwidths) widest = std::max(widest, h);
      const bool indefinite = std::any_of(halfwidths.begin(), halfwidths.end(), [](double h) { return std::isnan(h); });
      result.trajectory.push_back({n, indefinite ? std::numeric_limits<double>::quiet_NaN() : widest});
    }
    if (done) {
      result.terminal_n = n;
      result.intervals = std::move(intervals);
      result.estimates = std::move(estimates);
      return result;
    }
    target = grow(n, cfg.growth);
  }
}

}  // namespace mcse
