#include <catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "mcse/ar1.hpp"
#include "mcse/errors.hpp"
#include "mcse/experiments.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mcse::Method;
using mcse::MethodSpec;

namespace {

mcse::CoverageStudyConfig ar1_coverage(double rho, std::size_t reps) {
  mcse::CoverageStudyConfig cfg;
  cfg.sampler = mcse::SamplerSpec::ar1(rho);
  cfg.truth = {{0.0}, "stationary mean"};
  cfg.methods = mcse::standard_methods(0.5);
  cfg.checkpoints = {1000, 10000};
  cfg.replications = reps;
  cfg.base_seed = 77;
  cfg.threads = 1;
  return cfg;
}

const mcse::ReportRow& find_row(const mcse::ReplicationReport& rep, const std::string& method, std::size_t checkpoint,
                                const std::string& coord = "0") {
  for (const auto& r : rep.rows) {
    if (r.method == method && r.checkpoint == checkpoint && r.coordinate == coord) return r;
  }
  FAIL("row not found: " << method << " " << checkpoint << " " << coord);
  return rep.rows.front();
}

// Symmetric matrix of the quadratic form y -> estimator(y) by polarization.
Eigen::MatrixXd quadratic_form(std::size_t n, const Method& m, std::size_t b) {
  auto q = [&](const Eigen::VectorXd& y) {
    return mcse::estimate(mcse::SampleSeries(std::vector<double>(y.data(), y.data() + y.size())), m, b).value;
  };
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
      a(i, j) = 0.25 * (q(ei + ej) - q(ei - ej));
    }
  }
  return a;
}

}  // namespace

TEST_CASE("coverage MCSE and aggregation") {
  CHECK_THAT(mcse::coverage_mcse(0.95, 2000), WithinAbs(std::sqrt(0.95 * 0.05 / 2000.0), 1e-17));
  CHECK(mcse::coverage_mcse(1.0, 10) == 0.0);
  const auto m = mcse::sorted_moments({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK_THAT(m.variance, WithinAbs(5.0 / 3.0, 1e-15));
  CHECK(std::isnan(mcse::sorted_moments({1.0}).variance));
}

TEST_CASE("aggregation does not depend on replication order") {
  std::mt19937_64 gen(3);
  std::lognormal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(5001);
  for (auto& x : v) x = d(gen);
  const auto base = mcse::sorted_moments(v);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(v.begin(), v.end(), gen);
    const auto m = mcse::sorted_moments(v);
    CHECK(m.mean == base.mean);
    CHECK(m.variance == base.variance);
  }
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  mcse::parallel_for(1000, 4, [&](std::size_t r) { hits[r]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(mcse::parallel_for(50, 3,
                                     [](std::size_t r) {
                                       if (r == 17) throw std::runtime_error("boom");
                                     }),
                  std::runtime_error);
}

TEST_CASE("study configuration validation") {
  auto cfg = ar1_coverage(0.5, 10);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.methods.clear();
  CHECK_THROWS_AS(bad.validate(), mcse::ConfigError);
  bad = cfg;
  bad.checkpoints = {5000, 1000};
  CHECK_THROWS_AS(bad.validate(), mcse::ConfigError);
  bad = cfg;
  bad.truth = {{0.0, 1.0}, "wrong size"};
  CHECK_THROWS_AS(bad.validate(), mcse::ConfigError);
  bad = cfg;
  bad.truth.provenance.clear();
  CHECK_THROWS_AS(bad.validate(), mcse::ConfigError);
  bad = cfg;
  bad.replications = 1;
  CHECK_THROWS_AS(bad.validate(), mcse::ConfigError);
  bad = cfg;
  bad.methods = {{Method::bm(), 1.5}};
  CHECK_THROWS_AS(bad.validate(), mcse::ConfigError);
  CHECK_THROWS_AS(mcse::SamplerSpec::ar1(1.0), mcse::ConfigError);
}

TEST_CASE("coverage study on iid draws is near nominal") {
  auto cfg = ar1_coverage(0.0, 400);
  cfg.methods = {{Method::bm(), 0.5}, {Method::obm(), 0.5}};
  const auto rep = mcse::coverage_study(cfg);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& r : rep.rows) {
    INFO(r.method << " " << r.checkpoint << " " << r.coverage);
    CHECK(r.replications == 400);
    CHECK(r.flagged == 0);
    CHECK_THAT(r.coverage, WithinAbs(0.95, 3.0 * std::sqrt(0.95 * 0.05 / 400.0)));
    CHECK(r.mcse == mcse::coverage_mcse(r.coverage, 400));
    CHECK(r.covered == static_cast<std::size_t>(std::lround(r.coverage * 400)));
  }
}

TEST_CASE("coverage study is independent of the thread count") {
  auto cfg = ar1_coverage(0.5, 24);
  const auto one = mcse::coverage_study(cfg);
  cfg.threads = 3;
  const auto three = mcse::coverage_study(cfg);
  CHECK(one == three);
  cfg.base_seed = 78;
  CHECK_FALSE(one == mcse::coverage_study(cfg));
}

TEST_CASE("coverage replications share one chain across methods") {
  // OBM and partial OBM with stride 1 see identical data, so their rows agree.
  auto cfg = ar1_coverage(0.7, 30);
  cfg.methods = {{Method::obm(), 0.5}, {Method::partial_obm(1), 0.5}};
  const auto rep = mcse::coverage_study(cfg);
  for (const std::size_t cp : cfg.checkpoints) {
    const auto& a = find_row(rep, "OBM", cp);
    const auto& b = find_row(rep, Method::partial_obm(1).label(), cp);
    CHECK(a.covered == b.covered);
    CHECK(a.mean_sigma2 == b.mean_sigma2);
  }
}

TEST_CASE("fixed-width study with a trivially wide target") {
  mcse::FixedWidthStudyConfig cfg;
  cfg.sampler = mcse::SamplerSpec::ar1(0.5);
  cfg.truth = {{0.0}, "stationary mean"};
  cfg.methods = {{Method::bm(), 0.5}, {Method::sv(mcse::LagWindow::tukey_hanning()), 0.5}};
  cfg.stopping.epsilon = 1000.0;
  cfg.stopping.n_star = 1000;
  cfg.replications = 10;
  cfg.threads = 2;
  const auto rep = mcse::fixed_width_study(cfg);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& r : rep.rows) {
    CHECK(r.mean_n == 1100.0);
    CHECK(r.se_n == 0.0);
    CHECK(r.coverage == 1.0);
    CHECK(r.flagged == 0);
  }
}

TEST_CASE("fixed-width study flags runs that exceed the budget") {
  mcse::FixedWidthStudyConfig cfg;
  cfg.sampler = mcse::SamplerSpec::ar1(0.5);
  cfg.truth = {{0.0}, "stationary mean"};
  cfg.methods = {{Method::bm(), 0.5}};
  cfg.stopping.epsilon = 1e-3;
  cfg.stopping.n_star = 500;
  cfg.stopping.n_max = 5000;
  cfg.replications = 5;
  cfg.threads = 1;
  const auto rep = mcse::fixed_width_study(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].flagged == 5);
  CHECK(rep.rows[0].replications == 0);
  CHECK(std::isnan(rep.rows[0].coverage));
  CHECK(rep.flagged_total() == 5);
}

TEST_CASE("simultaneous coverage obeys the Bonferroni counting bound") {
  auto model = std::make_shared<const mcse::ProbitModel>(mcse::synth_probit(40, mcse::Beta(-0.5, 1.0, 0.75), 5));
  mcse::FixedWidthStudyConfig cfg;
  cfg.sampler = mcse::SamplerSpec::probit(model, mcse::Beta::Zero());
  cfg.truth = {{-0.5, 1.0, 0.75}, "generating coefficients"};
  cfg.methods = {{Method::bm(), 0.5}};
  cfg.stopping.epsilon = 0.3;
  cfg.stopping.n_star = 500;
  cfg.stopping.bonferroni = 3;
  cfg.replications = 30;
  cfg.threads = 2;
  const auto rep = mcse::fixed_width_study(cfg);
  REQUIRE(rep.rows.size() == 4);
  std::size_t misses = 0;
  for (int j = 0; j < 3; ++j) misses += 30 - find_row(rep, "BM", 0, std::to_string(j)).covered;
  const auto& sim = find_row(rep, "BM", 0, "sim");
  CHECK(sim.covered + misses >= 30);
  for (int j = 0; j < 3; ++j) CHECK(sim.covered <= find_row(rep, "BM", 0, std::to_string(j)).covered);
}

TEST_CASE("truth run matches batch means on the stored chain") {
  const auto sampler = mcse::SamplerSpec::ar1(0.5);
  const auto est = mcse::truth_run(sampler, 100000, 9, 4, mcse::BatchPolicy::fixed(250));
  REQUIRE(est.size() == 1);
  const auto chain = mcse::ar1_chain({0.5, 100000, std::nullopt, 9, 4});
  CHECK_THAT(est[0].mean, WithinAbs(chain.mean(), 1e-12));
  CHECK_THAT(est[0].sigma2, WithinRel(mcse::bm_estimate(chain, 250).value, 1e-9));
  CHECK(est[0].b == 250);
  CHECK(est[0].n == 100000);
  CHECK_THAT(est[0].mcse, WithinRel(std::sqrt(est[0].sigma2 / 100000.0), 1e-12));
  CHECK_THAT(est[0].mean, WithinAbs(0.0, 4.0 * est[0].mcse));
}

TEST_CASE("truth run keeps the full-length mean when n is not a multiple of b") {
  const auto sampler = mcse::SamplerSpec::ar1(0.3);
  const auto est = mcse::truth_run(sampler, 10007, 2, 0, mcse::BatchPolicy::power_law(0.5));
  const auto chain = mcse::ar1_chain({0.3, 10007, std::nullopt, 2, 0});
  CHECK(est[0].b == 100);
  CHECK_THAT(est[0].mean, WithinAbs(chain.mean(), 1e-12));
  CHECK_THAT(est[0].sigma2, WithinRel(mcse::bm_estimate(chain, 100).value, 1e-9));
}

TEST_CASE("MSE study matches exact expectations of the quadratic forms") {
  // For a mean-zero Gaussian Y with covariance S, E[Y'AY] = tr(A S).
  const double rho = 0.6;
  const std::size_t n = 20;
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cov(i, j) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j))) / (1.0 - rho * rho);
    }
  }
  mcse::MseStudyConfig cfg;
  cfg.rho = rho;
  cfg.n_list = {n};
  cfg.b_list = {2, 4, 5};
  cfg.methods = {Method::bm(), Method::obm()};
  cfg.replications = 4000;
  cfg.threads = 2;
  const auto rep = mcse::mse_study(cfg);
  CHECK_THAT(rep.sigma2, WithinRel(1.0 / ((1.0 - rho) * (1.0 - rho)), 1e-14));
  REQUIRE(rep.rows.size() == 6);
  for (const auto& row : rep.rows) {
    const Method m = row.method == "BM" ? Method::bm() : Method::obm();
    const double expected = (quadratic_form(n, m, row.b) * cov).trace();
    INFO(row.method << " b=" << row.b << " mean " << row.mean_sigma2 << " exact " << expected);
    CHECK_THAT(row.mean_sigma2, WithinAbs(expected, 4.0 * row.bias_se));
    CHECK_THAT(row.bias, WithinAbs(row.mean_sigma2 - rep.sigma2, 1e-12));
    // mse averages squared errors over R; variance uses the R - 1 divisor
    CHECK_THAT(row.mse, WithinRel(row.bias * row.bias + row.variance * 3999.0 / 4000.0, 1e-9));
    CHECK_THAT(row.b_bias, WithinRel(static_cast<double>(row.b) * row.bias, 1e-12));
  }
}

TEST_CASE("iid batch means are unbiased") {
  mcse::MseStudyConfig cfg;
  cfg.rho = 0.0;
  cfg.n_list = {20};
  cfg.b_list = {2, 5};
  cfg.replications = 4000;
  cfg.threads = 1;
  for (const auto b : cfg.b_list) CHECK_THAT((quadratic_form(20, Method::bm(), b)).trace(), WithinAbs(1.0, 1e-12));
  const auto rep = mcse::mse_study(cfg);
  for (const auto& row : rep.rows) CHECK_THAT(row.bias, WithinAbs(0.0, 4.0 * row.bias_se));
}

TEST_CASE("MSE study: common random numbers, one argmin, skipped pairs") {
  mcse::MseStudyConfig cfg;
  cfg.rho = 0.5;
  cfg.n_list = {400, 1000};
  cfg.b_list = {5, 10, 20, 300};
  cfg.methods = {Method::bm(), Method::obm()};
  cfg.replications = 50;
  cfg.threads = 3;
  const auto rep = mcse::mse_study(cfg);
  cfg.threads = 1;
  CHECK(rep == mcse::mse_study(cfg));
  // b = 300 is dropped at n = 400 only
  CHECK(rep.rows.size() == 2 * (3 + 4));
  for (const std::string method : {"BM", "OBM"}) {
    for (const std::size_t n : {400u, 1000u}) {
      int argmins = 0;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : rep.rows) {
        if (r.method != method || r.n != n) continue;
        best = std::min(best, r.mse);
      }
      for (const auto& r : rep.rows) {
        if (r.method != method || r.n != n) continue;
        argmins += r.argmin ? 1 : 0;
        if (r.argmin) CHECK(r.mse == best);
      }
      CHECK(argmins == 1);
    }
  }
  cfg.b_list = {600};
  cfg.n_list = {1000};
  CHECK_THROWS_AS(cfg.validate(), mcse::ConfigError);
}
