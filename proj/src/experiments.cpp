#include "mcse/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "accumulate.hpp"
#include "mcse/ar1.hpp"
#include "mcse/errors.hpp"

namespace mcse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::string coordinate_name(std::size_t j) { return std::to_string(j); }

// Mean and variance of counts or values for the report, with the MCSE
// convention for proportions.
void fill_coverage(ReportRow& row, std::size_t covered, std::size_t reps) {
  row.replications = reps;
  row.covered = covered;
  if (reps == 0) {
    row.coverage = kNaN;
    row.mcse = kNaN;
    return;
  }
  row.coverage = static_cast<double>(covered) / static_cast<double>(reps);
  row.mcse = coverage_mcse(row.coverage, reps);
}

// Reads a chain that several consumers share: draws are generated once, on
// demand, and every consumer sees the same prefix.
class SharedChain {
 public:
  explicit SharedChain(std::unique_ptr<IncrementalSampler> base)
      : base_(std::move(base)), history_(base_->dimension()) {}

  [[nodiscard]] std::size_t dimension() const { return history_.size(); }
  [[nodiscard]] std::size_t size() const { return history_.front().size(); }

  void ensure(std::size_t n) {
    if (size() < n) base_->extend(n - size(), history_);
  }
  [[nodiscard]] const std::vector<double>& coordinate(std::size_t j) const { return history_[j]; }

 private:
  std::unique_ptr<IncrementalSampler> base_;
  std::vector<std::vector<double>> history_;
};

class ReplaySampler final : public IncrementalSampler {
 public:
  explicit ReplaySampler(SharedChain& chain) : chain_(&chain) {}

  [[nodiscard]] std::size_t dimension() const override { return chain_->dimension(); }
  void extend(std::size_t steps, std::vector<std::vector<double>>& history) override {
    const std::size_t from = history.front().size();
    chain_->ensure(from + steps);
    for (std::size_t j = 0; j < history.size(); ++j) {
      const auto& src = chain_->coordinate(j);
      history[j].insert(history[j].end(), src.begin() + static_cast<std::ptrdiff_t>(from),
                        src.begin() + static_cast<std::ptrdiff_t>(from + steps));
    }
  }

 private:
  SharedChain* chain_;
};

// Estimates for several methods on one series, with spectral windows sharing
// a single autocovariance pass.
class SeriesEvaluator {
 public:
  SeriesEvaluator(const SampleSeries& s, std::span<const std::size_t> sv_batches) : s_(s) {
    std::size_t max_b = 0;
    for (const std::size_t b : sv_batches) max_b = std::max(max_b, b);
    if (max_b > 0) autocovs_ = autocov_prefix(s, max_b - 1);
  }

  [[nodiscard]] VarianceEstimate operator()(const Method& m, std::size_t b) const {
    if (m.kind() == MethodKind::SV) return sv_estimate_from_autocov(autocovs_, s_.size(), m.window(), b);
    return estimate(s_, m, b);
  }

 private:
  const SampleSeries& s_;
  std::vector<double> autocovs_;
};

void validate_methods(const std::vector<MethodSpec>& methods) {
  if (methods.empty()) throw ConfigError("at least one method is required");
  for (const auto& m : methods) {
    if (!(m.nu > 0.0 && m.nu < 1.0)) throw ConfigError("nu must lie in (0, 1)");
  }
}

void validate_truth(const TruthValue& truth, std::size_t dim) {
  if (truth.values.size() != dim) {
    throw ConfigError("truth has " + std::to_string(truth.values.size()) + " values, sampler has " +
                      std::to_string(dim) + " coordinates");
  }
  if (truth.provenance.empty()) throw ConfigError("truth values need a provenance");
}

}  // namespace

std::vector<MethodSpec> standard_methods(double nu) {
  return {{Method::bm(), nu},
          {Method::sv(LagWindow::modified_bartlett()), nu},
          {Method::obm(), nu},
          {Method::sv(LagWindow::tukey_hanning()), nu}};
}

SamplerSpec SamplerSpec::ar1(double rho, std::optional<double> x0) {
  if (!(std::abs(rho) < 1.0)) throw ConfigError("AR(1) needs |rho| < 1");
  SamplerSpec s;
  s.kind_ = Kind::Ar1;
  s.rho_ = rho;
  s.x0_ = x0;
  return s;
}

SamplerSpec SamplerSpec::probit(std::shared_ptr<const ProbitModel> model, const Beta& start, GammaReading reading) {
  if (!model) throw ConfigError("probit sampler needs a model");
  SamplerSpec s;
  s.kind_ = Kind::Probit;
  s.model_ = std::move(model);
  s.start_ = start;
  s.reading_ = reading;
  return s;
}

const ProbitModel& SamplerSpec::model() const {
  if (!model_) throw std::logic_error("sampler spec has no probit model");
  return *model_;
}

std::unique_ptr<IncrementalSampler> SamplerSpec::make(std::uint64_t seed, std::uint64_t stream) const {
  if (kind_ == Kind::Ar1) return std::make_unique<Ar1Sampler>(rho_, x0_, RngStream(seed, stream));
  return std::make_unique<PxdaSampler>(*model_, start_, RngStream(seed, stream), reading_);
}

std::string SamplerSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::Ar1) {
    os << "ar1(rho=" << rho_ << ", x0=";
    if (x0_) {
      os << *x0_;
    } else {
      os << "stationary";
    }
    os << ")";
  } else {
    os << "probit(n_obs=" << model_->observations() << ", start=(" << start_[0] << "," << start_[1] << ","
       << start_[2] << "), gamma=" << (reading_ == GammaReading::ShapeRate ? "shape-rate" : "shape-scale") << ")";
  }
  return os.str();
}

void CoverageStudyConfig::validate() const {
  validate_methods(methods);
  validate_truth(truth, sampler.dimension());
  if (replications < 2) throw ConfigError("replications must be >= 2");
  if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 4) throw ConfigError("checkpoints must be >= 4");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
  }
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  for (const auto& m : methods) {
    for (const std::size_t n : checkpoints) {
      const std::size_t b = floor_power(n, m.nu);
      try {
        (void)dof_for(m.method, n, b);
        if (b < 1 || b >= n) throw std::domain_error("b out of range");
      } catch (const std::domain_error&) {
        throw ConfigError(m.label() + " with nu = " + std::to_string(m.nu) + " is undefined at n = " +
                          std::to_string(n));
      }
    }
  }
}

void FixedWidthStudyConfig::validate() const {
  validate_methods(methods);
  validate_truth(truth, sampler.dimension());
  if (replications < 2) throw ConfigError("replications must be >= 2");
  try {
    stopping.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void MseStudyConfig::validate() const {
  if (!(std::abs(rho) < 1.0)) throw ConfigError("AR(1) needs |rho| < 1");
  if (n_list.empty() || b_list.empty()) throw ConfigError("n and b lists must be nonempty");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (replications < 2) throw ConfigError("replications must be >= 2");
  for (const std::size_t b : b_list) {
    if (b < 1) throw ConfigError("batch sizes must be >= 1");
  }
  bool any = false;
  for (const std::size_t n : n_list) {
    for (const std::size_t b : b_list) any = any || 2 * b < n;
  }
  if (!any) throw ConfigError("no (n, b) pair has b < n / 2");
}

bool operator==(const ReportRow& a, const ReportRow& b) {
  return a.study == b.study && a.method == b.method && same(a.nu, b.nu) && same(a.epsilon, b.epsilon) &&
         a.checkpoint == b.checkpoint && a.coordinate == b.coordinate && a.replications == b.replications &&
         a.covered == b.covered && a.flagged == b.flagged && same(a.coverage, b.coverage) && same(a.mcse, b.mcse) &&
         same(a.mean_n, b.mean_n) && same(a.se_n, b.se_n) && same(a.mean_sigma2, b.mean_sigma2) &&
         same(a.var_sigma2, b.var_sigma2);
}

bool operator==(const MseRow& a, const MseRow& b) {
  return a.method == b.method && a.n == b.n && a.b == b.b && a.replications == b.replications &&
         same(a.mean_sigma2, b.mean_sigma2) && same(a.bias, b.bias) && same(a.bias_se, b.bias_se) &&
         same(a.variance, b.variance) && same(a.mse, b.mse) && same(a.b_bias, b.b_bias) &&
         same(a.b_bias_se, b.b_bias_se) && same(a.scaled_variance, b.scaled_variance) && a.argmin == b.argmin;
}

std::size_t ReplicationReport::flagged_total() const {
  std::size_t total = 0;
  for (const auto& r : rows) {
    if (r.coordinate != "sim") total += r.flagged;
  }
  return total;
}

double coverage_mcse(double p, std::size_t r) {
  if (r == 0) return kNaN;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(r));
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          f(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Moments sorted_moments(std::vector<double> values) {
  Moments m;
  if (values.empty()) return {kNaN, kNaN};
  std::sort(values.begin(), values.end());
  const long double count = static_cast<long double>(values.size());
  const long double mean = detail::blocked_sum(values.data(), values.size()) / count;
  m.mean = static_cast<double>(mean);
  if (values.size() < 2) {
    m.variance = kNaN;
    return m;
  }
  long double ss = 0.0L;
  for (const double v : values) {
    const long double d = static_cast<long double>(v) - mean;
    ss += d * d;
  }
  m.variance = static_cast<double>(ss / (count - 1.0L));
  return m;
}

ReplicationReport coverage_study(const CoverageStudyConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.sampler.dimension();
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_checks = cfg.checkpoints.size();
  const std::size_t cells = n_methods * n_checks * dim;
  const std::size_t reps = cfg.replications;
  auto cell = [&](std::size_t m, std::size_t c, std::size_t j) { return (m * n_checks + c) * dim + j; };

  struct Outcome {
    std::vector<char> covered;
    std::vector<char> indefinite;
    std::vector<double> sigma2;
  };
  std::vector<Outcome> outcomes(reps);

  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    Outcome out{std::vector<char>(cells, 0), std::vector<char>(cells, 0), std::vector<double>(cells, kNaN)};
    auto sampler = cfg.sampler.make(cfg.base_seed, r);
    std::vector<std::vector<double>> history(dim);
    sampler->extend(cfg.checkpoints.back(), history);

    for (std::size_t c = 0; c < n_checks; ++c) {
      const std::size_t n = cfg.checkpoints[c];
      std::vector<std::size_t> batches(n_methods);
      std::vector<std::size_t> sv_batches;
      for (std::size_t m = 0; m < n_methods; ++m) {
        batches[m] = floor_power(n, cfg.methods[m].nu);
        if (cfg.methods[m].method.kind() == MethodKind::SV) sv_batches.push_back(batches[m]);
      }
      for (std::size_t j = 0; j < dim; ++j) {
        const SampleSeries series(std::vector<double>(history[j].begin(), history[j].begin() + static_cast<std::ptrdiff_t>(n)));
        const SeriesEvaluator eval(series, sv_batches);
        for (std::size_t m = 0; m < n_methods; ++m) {
          const VarianceEstimate est = eval(cfg.methods[m].method, batches[m]);
          const std::size_t k = cell(m, c, j);
          out.sigma2[k] = est.value;
          if (est.indefinite()) {
            out.indefinite[k] = 1;
            continue;
          }
          const ConfidenceInterval ci = interval(series.mean(), est, cfg.level);
          out.covered[k] = ci.covers(cfg.truth.values[j]) ? 1 : 0;
        }
      }
    }
    outcomes[r] = std::move(out);
  });

  ReplicationReport report;
  for (std::size_t m = 0; m < n_methods; ++m) {
    for (std::size_t c = 0; c < n_checks; ++c) {
      std::size_t sim_covered = 0;
      for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t k = cell(m, c, j);
        std::size_t covered = 0;
        std::size_t flagged = 0;
        std::vector<double> values(reps);
        for (std::size_t r = 0; r < reps; ++r) {
          covered += static_cast<std::size_t>(outcomes[r].covered[k]);
          flagged += static_cast<std::size_t>(outcomes[r].indefinite[k]);
          values[r] = outcomes[r].sigma2[k];
        }
        const Moments mom = sorted_moments(std::move(values));
        ReportRow row;
        row.study = "coverage";
        row.method = cfg.methods[m].label();
        row.nu = cfg.methods[m].nu;
        row.epsilon = kNaN;
        row.checkpoint = cfg.checkpoints[c];
        row.coordinate = coordinate_name(j);
        row.flagged = flagged;
        fill_coverage(row, covered, reps);
        row.mean_n = kNaN;
        row.se_n = kNaN;
        row.mean_sigma2 = mom.mean;
        row.var_sigma2 = mom.variance;
        report.rows.push_back(row);
      }
      if (dim > 1) {
        std::size_t flagged = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          bool all = true;
          bool any_flag = false;
          for (std::size_t j = 0; j < dim; ++j) {
            all = all && outcomes[r].covered[cell(m, c, j)] != 0;
            any_flag = any_flag || outcomes[r].indefinite[cell(m, c, j)] != 0;
          }
          sim_covered += all ? 1 : 0;
          flagged += any_flag ? 1 : 0;
        }
        ReportRow row;
        row.study = "coverage";
        row.method = cfg.methods[m].label();
        row.nu = cfg.methods[m].nu;
        row.epsilon = kNaN;
        row.checkpoint = cfg.checkpoints[c];
        row.coordinate = "sim";
        row.flagged = flagged;
        fill_coverage(row, sim_covered, reps);
        row.mean_n = kNaN;
        row.se_n = kNaN;
        row.mean_sigma2 = kNaN;
        row.var_sigma2 = kNaN;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

ReplicationReport fixed_width_study(const FixedWidthStudyConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.sampler.dimension();
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t reps = cfg.replications;

  struct Outcome {
    std::vector<std::size_t> terminal_n;  // 0 marks a budget-exceeded run
    std::vector<char> covered;            // n_methods x dim
    std::vector<double> sigma2;
  };
  std::vector<Outcome> outcomes(reps);

  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    Outcome out{std::vector<std::size_t>(n_methods, 0), std::vector<char>(n_methods * dim, 0),
                std::vector<double>(n_methods * dim, kNaN)};
    SharedChain chain(cfg.sampler.make(cfg.base_seed, r));
    for (std::size_t m = 0; m < n_methods; ++m) {
      ReplaySampler replay(chain);
      const EstimatorConfig est{cfg.methods[m].method, BatchPolicy::power_law(cfg.methods[m].nu)};
      try {
        const FixedWidthResult res = run_fixed_width(replay, est, cfg.stopping);
        out.terminal_n[m] = res.terminal_n;
        for (std::size_t j = 0; j < dim; ++j) {
          out.covered[m * dim + j] = res.intervals[j].covers(cfg.truth.values[j]) ? 1 : 0;
          out.sigma2[m * dim + j] = res.estimates[j].value;
        }
      } catch (const BudgetExceededError&) {
        out.terminal_n[m] = 0;
      }
    }
    outcomes[r] = std::move(out);
  });

  ReplicationReport report;
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::vector<double> ns;
    std::size_t exceeded = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      if (outcomes[r].terminal_n[m] == 0) {
        ++exceeded;
      } else {
        ns.push_back(static_cast<double>(outcomes[r].terminal_n[m]));
      }
    }
    const std::size_t done = ns.size();
    const Moments n_mom = sorted_moments(std::move(ns));
    const double se_n = done >= 2 ? std::sqrt(n_mom.variance / static_cast<double>(done)) : kNaN;

    auto base_row = [&](std::string coordinate) {
      ReportRow row;
      row.study = "fixed-width";
      row.method = cfg.methods[m].label();
      row.nu = cfg.methods[m].nu;
      row.epsilon = cfg.stopping.epsilon;
      row.checkpoint = 0;
      row.coordinate = std::move(coordinate);
      row.flagged = exceeded;
      row.mean_n = n_mom.mean;
      row.se_n = se_n;
      return row;
    };

    for (std::size_t j = 0; j < dim; ++j) {
      std::size_t covered = 0;
      std::vector<double> values;
      for (std::size_t r = 0; r < reps; ++r) {
        if (outcomes[r].terminal_n[m] == 0) continue;
        covered += static_cast<std::size_t>(outcomes[r].covered[m * dim + j]);
        values.push_back(outcomes[r].sigma2[m * dim + j]);
      }
      const Moments mom = sorted_moments(std::move(values));
      ReportRow row = base_row(coordinate_name(j));
      fill_coverage(row, covered, done);
      row.mean_sigma2 = mom.mean;
      row.var_sigma2 = mom.variance;
      report.rows.push_back(row);
    }
    if (dim > 1) {
      std::size_t covered = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        if (outcomes[r].terminal_n[m] == 0) continue;
        bool all = true;
        for (std::size_t j = 0; j < dim; ++j) all = all && outcomes[r].covered[m * dim + j] != 0;
        covered += all ? 1 : 0;
      }
      ReportRow row = base_row("sim");
      fill_coverage(row, covered, done);
      row.mean_sigma2 = kNaN;
      row.var_sigma2 = kNaN;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::vector<TruthEstimate> truth_run(const SamplerSpec& sampler, std::size_t n, std::uint64_t seed,
                                     std::uint64_t stream, const BatchPolicy& policy) {
  const std::size_t b = batch_size(policy, n);
  const std::size_t a = n / b;
  if (a < 2) throw ConfigError("truth_run needs at least two batches");
  const std::size_t dim = sampler.dimension();
  auto chain = sampler.make(seed, stream);

  // Chunks hold whole batches so each batch sum is one contiguous pass.
  const std::size_t per_chunk = std::max<std::size_t>(1, (std::size_t{1} << 16) / b) * b;
  std::vector<std::vector<double>> buffer(dim);
  std::vector<std::vector<long double>> batch_sums(dim);
  std::vector<long double> totals(dim, 0.0L);
  for (auto& v : batch_sums) v.reserve(a);

  std::size_t produced = 0;
  while (produced < n) {
    const std::size_t steps = std::min(per_chunk, n - produced);
    for (auto& h : buffer) h.clear();
    chain->extend(steps, buffer);
    for (std::size_t j = 0; j < dim; ++j) {
      const double* x = buffer[j].data();
      totals[j] += detail::blocked_sum(x, steps);
      for (std::size_t off = 0; off + b <= steps; off += b) {
        if (batch_sums[j].size() == a) break;
        batch_sums[j].push_back(detail::blocked_sum(x + off, b));
      }
    }
    produced += steps;
  }

  std::vector<TruthEstimate> out(dim);
  const long double lb = static_cast<long double>(b);
  for (std::size_t j = 0; j < dim; ++j) {
    long double span = 0.0L;
    for (const long double s : batch_sums[j]) span += s;
    const long double grand = span / (static_cast<long double>(a) * lb);
    long double ss = 0.0L;
    for (const long double s : batch_sums[j]) {
      const long double dev = s / lb - grand;
      ss += dev * dev;
    }
    const double sigma2 = static_cast<double>(ss * lb / static_cast<long double>(a - 1));
    out[j].mean = static_cast<double>(totals[j] / static_cast<long double>(n));
    out[j].sigma2 = sigma2;
    out[j].mcse = std::sqrt(sigma2 / static_cast<double>(n));
    out[j].b = b;
    out[j].n = n;
  }
  return out;
}

MseReport mse_study(const MseStudyConfig& cfg) {
  cfg.validate();
  const Ar1Truth truth = ar1_truth(cfg.rho);
  const SamplerSpec spec = SamplerSpec::ar1(cfg.rho, cfg.x0);
  const std::size_t max_n = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());

  struct Cell {
    std::size_t method;
    std::size_t n;
    std::size_t b;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    for (const std::size_t n : cfg.n_list) {
      for (const std::size_t b : cfg.b_list) {
        if (2 * b < n) cells.push_back({m, n, b});
      }
    }
  }

  const std::size_t reps = cfg.replications;
  std::vector<std::vector<double>> values(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    auto sampler = spec.make(cfg.base_seed, r);
    std::vector<std::vector<double>> history(1);
    sampler->extend(max_n, history);
    std::vector<double> out(cells.size(), kNaN);
    for (const std::size_t n : cfg.n_list) {
      const SampleSeries series(std::vector<double>(history[0].begin(), history[0].begin() + static_cast<std::ptrdiff_t>(n)));
      std::vector<std::size_t> sv_batches;
      for (const auto& c : cells) {
        if (c.n == n && cfg.methods[c.method].kind() == MethodKind::SV) sv_batches.push_back(c.b);
      }
      const SeriesEvaluator eval(series, sv_batches);
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].n != n) continue;
        out[k] = eval(cfg.methods[cells[k].method], cells[k].b).value;
      }
    }
    values[r] = std::move(out);
  });

  MseReport report;
  report.sigma2 = truth.sigma2;
  report.gamma_const = truth.gamma_const;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::vector<double> v(reps);
    std::vector<double> sq(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      v[r] = values[r][k];
      const double e = v[r] - truth.sigma2;
      sq[r] = e * e;
    }
    const Moments mom = sorted_moments(std::move(v));
    const Moments err = sorted_moments(std::move(sq));
    const double b = static_cast<double>(cells[k].b);
    MseRow row;
    row.method = cfg.methods[cells[k].method].label();
    row.n = cells[k].n;
    row.b = cells[k].b;
    row.replications = reps;
    row.mean_sigma2 = mom.mean;
    row.bias = mom.mean - truth.sigma2;
    row.bias_se = std::sqrt(mom.variance / static_cast<double>(reps));
    row.variance = mom.variance;
    row.mse = err.mean;
    row.b_bias = b * row.bias;
    row.b_bias_se = b * row.bias_se;
    row.scaled_variance = static_cast<double>(cells[k].n) / b * mom.variance;
    report.rows.push_back(row);
  }
  // Mark the MSE-minimizing b within each (method, n); the first wins a tie.
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    bool best = true;
    for (std::size_t k = 0; k < report.rows.size() && best; ++k) {
      const auto& a = report.rows[i];
      const auto& c = report.rows[k];
      if (k == i || a.method != c.method || a.n != c.n) continue;
      if (c.mse < a.mse || (c.mse == a.mse && k < i)) best = false;
    }
    report.rows[i].argmin = best;
  }
  return report;
}

}  // namespace mcse
