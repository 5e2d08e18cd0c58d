#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mcse {

/// Ordered output g(X_1), ..., g(X_n) of a chain.
///
/// Values are stored raw; every operation centers internally with the sample
/// mean. Construction rejects empty input and non-finite values.
class SampleSeries {
 public:
  explicit SampleSeries(std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  /// Cached arithmetic mean.
  [[nodiscard]] double mean() const noexcept { return mean_; }

  /// The first n observations as a new series.
  [[nodiscard]] SampleSeries head(std::size_t n) const;

 private:
  std::vector<double> values_;
  double mean_ = 0.0;
};

[[nodiscard]] double series_mean(const SampleSeries& s);

/// gamma_n(lag) = n^{-1} sum_{t=1}^{n-lag} (Y_t - Ybar)(Y_{t+lag} - Ybar).
///
/// Uses the n divisor at every lag. Throws std::domain_error when lag >= n.
[[nodiscard]] double autocov(const SampleSeries& s, std::size_t lag);

/// gamma_n(0), ..., gamma_n(max_lag), each identical to autocov(s, k).
[[nodiscard]] std::vector<double> autocov_prefix(const SampleSeries& s, std::size_t max_lag);

/// Reads a series file: one number per line, or a CSV column when `column`
/// is non-empty (the first row is then a header naming the columns).
[[nodiscard]] SampleSeries read_series_file(const std::string& path, const std::string& column = {});

}  // namespace mcse
