#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcse/ar1.hpp"
#include "mcse/errors.hpp"
#include "mcse/inference.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mcse::LagWindow;
using mcse::Method;

namespace {

// Upper quantile of N(0, 1) by bisection on erfc.
double normal_upper(double p) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::numbers::sqrt2) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// P(T <= x) for x >= 0 by composite Simpson on the t density.
double t_cdf(double x, double nu) {
  const double c = std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) / std::sqrt(nu * std::numbers::pi);
  const int m = 20000;
  const double h = x / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = i * h;
    const double f = c * std::pow(1.0 + t * t / nu, -(nu + 1.0) / 2.0);
    s += f * (i == 0 || i == m ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
  }
  return 0.5 + s * h / 3.0;
}

mcse::VarianceEstimate make_est(double value, std::size_t n, std::size_t dof) {
  mcse::VarianceEstimate e;
  e.value = value;
  e.n = n;
  e.dof = dof;
  e.b = 1;
  return e;
}

mcse::StoppingConfig stopping(double eps, std::size_t n_star) {
  mcse::StoppingConfig c;
  c.epsilon = eps;
  c.n_star = n_star;
  return c;
}

}  // namespace

TEST_CASE("t quantiles against closed forms") {
  CHECK_THAT(mcse::t_quantile(0.95, 1), WithinAbs(std::tan(std::numbers::pi * 0.475), 1e-9));
  CHECK_THAT(mcse::t_quantile(0.95, 1), WithinAbs(12.7062, 1e-3));
  for (const double level : {0.5, 0.9, 0.95, 0.99}) {
    const double p = (1.0 + level) / 2.0;
    CHECK_THAT(mcse::t_quantile(level, 2), WithinAbs((2.0 * p - 1.0) / std::sqrt(2.0 * p * (1.0 - p)), 1e-9));
  }
  CHECK_THAT(mcse::t_quantile(0.95, 2), WithinAbs(4.30265, 1e-3));
  CHECK_THAT(mcse::t_quantile(0.95, 1000000), WithinAbs(normal_upper(0.975), 1e-4));
  CHECK_THAT(mcse::t_quantile(0.95, 1000000), WithinAbs(1.95996, 1e-4));
}

TEST_CASE("t quantiles invert a numerically integrated CDF") {
  for (const std::int64_t dof : {3, 5, 9, 30, 120}) {
    for (const double level : {0.8, 0.95, 0.995}) {
      const double q = mcse::t_quantile(level, dof);
      CHECK_THAT(t_cdf(q, static_cast<double>(dof)), WithinAbs((1.0 + level) / 2.0, 1e-9));
    }
  }
}

TEST_CASE("t quantiles decrease in dof") {
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t dof = 1; dof < 5000; dof = dof * 3 / 2 + 1) {
    const double q = mcse::t_quantile(0.95, dof);
    CHECK(q < prev);
    prev = q;
  }
  CHECK_THROWS_AS(mcse::t_quantile(0.95, 0), std::domain_error);
}

TEST_CASE("degrees of freedom") {
  CHECK(mcse::dof_for(Method::bm(), 100, 10) == 9);
  CHECK(mcse::dof_for(Method::obm(), 100, 10) == 90);
  CHECK(mcse::dof_for(Method::sv(LagWindow::tukey_hanning()), 1000, 31) == 969);
  CHECK(mcse::dof_for(Method::partial_obm(4), 100, 20) == 80);
  CHECK(mcse::dof_for(Method::bm(), 105, 10) == 9);
  CHECK_THROWS_AS(mcse::dof_for(Method::bm(), 15, 10), std::domain_error);
  CHECK_THROWS_AS(mcse::dof_for(Method::obm(), 10, 10), std::domain_error);
}

TEST_CASE("confidence intervals") {
  const auto ci = mcse::interval(0.0, make_est(4.0, 400, 1000000), 0.95);
  CHECK_THAT(ci.halfwidth, WithinAbs(0.19600, 1e-5));
  CHECK(ci.covers(0.19));
  CHECK_FALSE(ci.covers(0.2));
  const auto zero = mcse::interval(3.0, make_est(0.0, 50, 10), 0.95);
  CHECK(zero.halfwidth == 0.0);
  CHECK(zero.covers(3.0));
  CHECK_THROWS_AS(mcse::interval(0.0, make_est(-1e-9, 50, 10), 0.95), mcse::IndefiniteVarianceError);
}

TEST_CASE("half-width does not increase with dof") {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t dof = 1; dof <= 2000; dof += 7) {
    const double h = mcse::interval(0.0, make_est(2.5, 900, dof), 0.9).halfwidth;
    CHECK(h <= prev);
    prev = h;
  }
}

TEST_CASE("Bonferroni levels") {
  CHECK_THAT(mcse::bonferroni_level(0.95, 3), WithinAbs(0.95 + 0.05 * 2.0 / 3.0, 1e-15));
  CHECK(mcse::bonferroni_level(0.95, 1) == 0.95);
  CHECK_THAT(mcse::bonferroni_level(0.90, 2), WithinAbs(0.95, 1e-15));
  CHECK_THROWS_AS(mcse::bonferroni_level(0.95, 0), std::domain_error);
}

TEST_CASE("stopping rule arithmetic") {
  const auto cfg = stopping(0.2, 10000);
  const std::vector<double> tiny{0.0};
  CHECK_FALSE(mcse::stop_check(tiny, 5000, cfg));
  CHECK_FALSE(mcse::stop_check(tiny, 10000, cfg));
  const std::vector<double> h1{0.15};
  CHECK(mcse::stop_check(h1, 20000, cfg));
  const std::vector<double> h2{0.1999};
  CHECK(mcse::stop_check(h2, 20000, cfg));
  const std::vector<double> h3{0.19996};
  CHECK_FALSE(mcse::stop_check(h3, 20000, cfg));
  const std::vector<double> multi{0.01, 0.19996, 0.02};
  CHECK_FALSE(mcse::stop_check(multi, 20000, cfg));
  const std::vector<double> indefinite{0.01, std::numeric_limits<double>::quiet_NaN()};
  CHECK_FALSE(mcse::stop_check(indefinite, 20000, cfg));
}

TEST_CASE("stopping rule never holds at or below n*") {
  for (const std::size_t n_star : {1u, 10u, 1000u}) {
    const auto cfg = stopping(0.5, n_star);
    const std::vector<double> zero{0.0, 0.0};
    for (std::size_t n = 1; n <= n_star; n += std::max<std::size_t>(1, n_star / 50)) {
      CHECK_FALSE(mcse::stop_check(zero, n, cfg));
    }
  }
}

TEST_CASE("stopping configuration validation") {
  auto cfg = stopping(0.1, 100);
  CHECK_NOTHROW(cfg.validate());
  cfg.growth = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = stopping(-1.0, 100);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = stopping(0.1, 100);
  cfg.n_max = 50;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("fixed-width run with a trivially wide target") {
  const mcse::EstimatorConfig est{Method::bm(), mcse::BatchPolicy::power_law(0.5)};
  mcse::Ar1Sampler chain(0.5, 1.0, mcse::RngStream(1, 0));
  const auto res = mcse::run_fixed_width(chain, est, stopping(1000.0, 1000));
  CHECK(res.terminal_n == 1100);
  CHECK(res.checks == 1);
  REQUIRE(res.intervals.size() == 1);

  auto cfg = stopping(1000.0, 1000);
  cfg.first_check = mcse::FirstCheck::JustPastMinimum;
  mcse::Ar1Sampler chain2(0.5, 1.0, mcse::RngStream(1, 0));
  CHECK(mcse::run_fixed_width(chain2, est, cfg).terminal_n == 1001);

  mcse::Ar1Sampler chain3(0.5, 1.0, mcse::RngStream(1, 0));
  CHECK(mcse::run_fixed_width(chain3, est, stopping(1000.0, 777)).terminal_n == 855);
}

TEST_CASE("fixed-width terminal n for AR(1) tracks sigma^2 (1.96/eps)^2") {
  // sigma^2 = 4 for rho = 0.5, so the target is 4 * (1.96 / 0.05)^2 = 6146.6
  const mcse::EstimatorConfig est{Method::bm(), mcse::BatchPolicy::power_law(0.5)};
  std::vector<double> terminal;
  for (std::uint64_t seed = 0; seed < 21; ++seed) {
    mcse::Ar1Sampler chain(0.5, std::nullopt, mcse::RngStream(seed, 0));
    terminal.push_back(static_cast<double>(mcse::run_fixed_width(chain, est, stopping(0.05, 1000)).terminal_n));
  }
  std::sort(terminal.begin(), terminal.end());
  const double target = 4.0 * std::pow(mcse::t_quantile(0.95, 1000000) / 0.05, 2.0);
  CHECK_THAT(terminal[10], WithinRel(target, 0.15));
}

TEST_CASE("fixed-width runs replay exactly") {
  const mcse::EstimatorConfig est{Method::sv(LagWindow::tukey_hanning()), mcse::BatchPolicy::power_law(0.5)};
  auto run = [&] {
    mcse::Ar1Sampler chain(0.9, 0.0, mcse::RngStream(42, 3));
    return mcse::run_fixed_width(chain, est, stopping(0.1, 2000), true);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.terminal_n == b.terminal_n);
  CHECK(a.intervals[0].center == b.intervals[0].center);
  CHECK(a.intervals[0].halfwidth == b.intervals[0].halfwidth);
  CHECK(a.trajectory.size() == b.trajectory.size());
}

TEST_CASE("trajectory: growth schedule and last point") {
  const mcse::EstimatorConfig est{Method::obm(), mcse::BatchPolicy::power_law(0.5)};
  mcse::Ar1Sampler chain(0.7, 0.0, mcse::RngStream(8, 0));
  const auto cfg = stopping(0.08, 500);
  const auto res = mcse::run_fixed_width(chain, est, cfg, true);
  REQUIRE(res.trajectory.size() == res.checks);
  CHECK(res.trajectory.front().n == 550);
  for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
    const auto prev = res.trajectory[i - 1].n;
    CHECK(res.trajectory[i].n == static_cast<std::size_t>(std::ceil(1.1 * static_cast<double>(prev) - 1e-9)));
    const std::vector<double> h{res.trajectory[i - 1].max_halfwidth};
    CHECK_FALSE(mcse::stop_check(h, prev, cfg));
  }
  CHECK(res.trajectory.back().n == res.terminal_n);
  CHECK(res.trajectory.back().max_halfwidth == res.intervals[0].halfwidth);
  CHECK(res.intervals[0].halfwidth + 1.0 / static_cast<double>(res.terminal_n) <= 0.08);
}

TEST_CASE("fixed-width budget") {
  const mcse::EstimatorConfig est{Method::bm(), mcse::BatchPolicy::power_law(0.5)};
  mcse::Ar1Sampler chain(0.5, 0.0, mcse::RngStream(1, 0));
  auto cfg = stopping(1e-4, 1000);
  cfg.n_max = 20000;
  CHECK_THROWS_AS(mcse::run_fixed_width(chain, est, cfg), mcse::BudgetExceededError);
}
