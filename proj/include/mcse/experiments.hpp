#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcse/estimators.hpp"
#include "mcse/inference.hpp"
#include "mcse/probit.hpp"

namespace mcse {

/// A variance estimator together with its batch-size exponent, b_n = floor(n^nu).
struct MethodSpec {
  Method method = Method::bm();
  double nu = 0.5;

  [[nodiscard]] std::string label() const { return method.label(); }
};

/// BM, Brt, OBM and TH at one exponent, in that order.
[[nodiscard]] std::vector<MethodSpec> standard_methods(double nu);

/// Which chain a study simulates.
class SamplerSpec {
 public:
  enum class Kind { Ar1, Probit };

  static SamplerSpec ar1(double rho, std::optional<double> x0 = std::nullopt);
  static SamplerSpec probit(std::shared_ptr<const ProbitModel> model, const Beta& start = kLupusStart,
                            GammaReading reading = GammaReading::ShapeRate);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return kind_ == Kind::Ar1 ? 1 : 3; }
  [[nodiscard]] double rho() const noexcept { return rho_; }
  [[nodiscard]] const std::optional<double>& x0() const noexcept { return x0_; }
  [[nodiscard]] const ProbitModel& model() const;
  [[nodiscard]] const Beta& start() const noexcept { return start_; }
  [[nodiscard]] GammaReading reading() const noexcept { return reading_; }

  /// Fresh chain driven by RngStream(seed, stream).
  [[nodiscard]] std::unique_ptr<IncrementalSampler> make(std::uint64_t seed, std::uint64_t stream) const;
  [[nodiscard]] std::string describe() const;

 private:
  Kind kind_ = Kind::Ar1;
  double rho_ = 0.0;
  std::optional<double> x0_;
  std::shared_ptr<const ProbitModel> model_;
  Beta start_ = Beta::Zero();
  GammaReading reading_ = GammaReading::ShapeRate;
};

/// Reference values of the estimated expectations and where they came from.
struct TruthValue {
  std::vector<double> values;
  std::string provenance;
};

struct CoverageStudyConfig {
  SamplerSpec sampler = SamplerSpec::ar1(0.5);
  TruthValue truth;
  std::vector<MethodSpec> methods;
  std::vector<std::size_t> checkpoints;
  std::size_t replications = 200;
  double level = 0.95;
  std::uint64_t base_seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct FixedWidthStudyConfig {
  SamplerSpec sampler = SamplerSpec::ar1(0.5);
  TruthValue truth;
  std::vector<MethodSpec> methods;
  StoppingConfig stopping;
  std::size_t replications = 200;
  std::uint64_t base_seed = 0;
  std::size_t threads = 0;

  void validate() const;
};

/// One aggregated cell. Coverage studies fill `checkpoint`; fixed-width
/// studies fill `epsilon`, `mean_n` and `se_n`. Coordinate "sim" holds the
/// simultaneous (all coordinates) coverage. Unused numeric fields are NaN.
struct ReportRow {
  std::string study;
  std::string method;
  double nu = 0.0;
  double epsilon = 0.0;
  std::size_t checkpoint = 0;
  std::string coordinate;
  std::size_t replications = 0;  // replications entering the coverage fraction
  std::size_t covered = 0;
  std::size_t flagged = 0;  // indefinite estimates (coverage) or budget-exceeded runs (fixed width)
  double coverage = 0.0;
  double mcse = 0.0;  // sqrt(coverage (1 - coverage) / replications)
  double mean_n = 0.0;
  double se_n = 0.0;
  double mean_sigma2 = 0.0;
  double var_sigma2 = 0.0;

  friend bool operator==(const ReportRow& a, const ReportRow& b);
};

struct ReplicationReport {
  std::vector<ReportRow> rows;
  [[nodiscard]] std::size_t flagged_total() const;
  friend bool operator==(const ReplicationReport&, const ReplicationReport&) = default;
};

/// sqrt(p (1 - p) / r).
[[nodiscard]] double coverage_mcse(double p, std::size_t r);

/// Runs f(r) for r in [0, count) on a pool of worker threads. f must only
/// write to state owned by index r.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& f);

/// Order-independent mean and sample variance: values are sorted before
/// being summed in extended precision.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // divisor count - 1; NaN for fewer than 2 values
};
[[nodiscard]] Moments sorted_moments(std::vector<double> values);

/// Replication r simulates one chain on stream r up to the last checkpoint;
/// every method is evaluated on that same chain at every checkpoint.
[[nodiscard]] ReplicationReport coverage_study(const CoverageStudyConfig& cfg);

/// Replication r runs every method's fixed-width procedure on the chain of
/// stream r (methods share the draws).
[[nodiscard]] ReplicationReport fixed_width_study(const FixedWidthStudyConfig& cfg);

struct TruthEstimate {
  double mean = 0.0;
  double mcse = 0.0;    // sqrt(sigma2 / n)
  double sigma2 = 0.0;  // batch-means estimate
  std::size_t b = 0;
  std::size_t n = 0;
};

/// Long run with streaming batch means: keeps one mean per batch instead of
/// the chain history. Matches bm_estimate on the same draws.
[[nodiscard]] std::vector<TruthEstimate> truth_run(const SamplerSpec& sampler, std::size_t n, std::uint64_t seed,
                                                   std::uint64_t stream, const BatchPolicy& policy);

struct MseStudyConfig {
  double rho = 0.5;
  std::optional<double> x0;
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> b_list;
  std::vector<Method> methods{Method::bm()};
  std::size_t replications = 200;
  std::uint64_t base_seed = 0;
  std::size_t threads = 0;

  void validate() const;
};

struct MseRow {
  std::string method;
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t replications = 0;
  double mean_sigma2 = 0.0;
  double bias = 0.0;
  double bias_se = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  double b_bias = 0.0;
  double b_bias_se = 0.0;
  double scaled_variance = 0.0;  // (n / b) Var
  bool argmin = false;           // smallest MSE over b for this (method, n)

  friend bool operator==(const MseRow& a, const MseRow& b);
};

struct MseReport {
  double sigma2 = 0.0;
  double gamma_const = 0.0;
  std::vector<MseRow> rows;
  friend bool operator==(const MseReport&, const MseReport&) = default;
};

/// Bias, variance and MSE of each estimator against the closed-form AR(1)
/// sigma^2. Replication r uses stream r for every (n, b) pair, so the
/// comparison across batch sizes uses common random numbers. Pairs with
/// b >= n / 2 are skipped.
[[nodiscard]] MseReport mse_study(const MseStudyConfig& cfg);

}  // namespace mcse
