#include "mcse/series.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "accumulate.hpp"

namespace mcse {

namespace {

std::vector<double> centered(std::span<const double> values, double mean) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] - mean;
  return out;
}

double lagged_product(const std::vector<double>& c, std::size_t lag) {
  const std::size_t n = c.size();
  return static_cast<double>(detail::blocked_dot(c.data(), c.data() + lag, n - lag) /
                             static_cast<long double>(n));
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, const std::string& path, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

SampleSeries::SampleSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("SampleSeries: series must contain at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("SampleSeries: non-finite value at index " + std::to_string(i));
    }
  }
  mean_ = static_cast<double>(detail::blocked_sum(values_.data(), values_.size()) /
                              static_cast<long double>(values_.size()));
}

SampleSeries SampleSeries::head(std::size_t n) const {
  if (n == 0 || n > values_.size()) {
    throw std::out_of_range("SampleSeries::head: length " + std::to_string(n) + " not in [1, " +
                            std::to_string(values_.size()) + "]");
  }
  return SampleSeries(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)));
}

double series_mean(const SampleSeries& s) { return s.mean(); }

double autocov(const SampleSeries& s, std::size_t lag) {
  if (lag >= s.size()) {
    throw std::domain_error("autocov: lag " + std::to_string(lag) + " must be < n = " + std::to_string(s.size()));
  }
  return lagged_product(centered(s.values(), s.mean()), lag);
}

std::vector<double> autocov_prefix(const SampleSeries& s, std::size_t max_lag) {
  if (max_lag >= s.size()) {
    throw std::domain_error("autocov_prefix: max_lag " + std::to_string(max_lag) + " must be < n = " +
                            std::to_string(s.size()));
  }
  const auto c = centered(s.values(), s.mean());
  std::vector<double> out(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) out[k] = lagged_product(c, k);
  return out;
}

SampleSeries read_series_file(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open series file: " + path);

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  std::ptrdiff_t col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (column.empty()) {
      values.push_back(parse_number(t, path, line_no));
      continue;
    }
    const auto fields = split_csv(t);
    if (col < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == column) col = static_cast<std::ptrdiff_t>(i);
      }
      if (col < 0) throw std::invalid_argument(path + ": no column named '" + column + "'");
      continue;
    }
    if (static_cast<std::size_t>(col) >= fields.size()) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": missing column '" + column + "'");
    }
    values.push_back(parse_number(fields[static_cast<std::size_t>(col)], path, line_no));
  }
  return SampleSeries(std::move(values));
}

}  // namespace mcse
