#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "mcse/series.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mcse::SampleSeries;

namespace {

std::vector<double> random_values(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

// Textbook double loop, independent of the library's blocked sums.
double naive_autocov(const std::vector<double>& y, std::size_t lag) {
  long double mean = 0.0L;
  for (const double v : y) mean += v;
  mean /= static_cast<long double>(y.size());
  long double s = 0.0L;
  for (std::size_t t = 0; t + lag < y.size(); ++t) s += (y[t] - mean) * (y[t + lag] - mean);
  return static_cast<double>(s / static_cast<long double>(y.size()));
}

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = std::string(P_tmpdir) + "/mcse_test_" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("series mean") {
  CHECK(mcse::series_mean(SampleSeries({1, 2, 3})) == 2.0);
  CHECK(mcse::series_mean(SampleSeries({5})) == 5.0);
  CHECK(mcse::series_mean(SampleSeries({1, 3, 2, 6})) == 3.0);
}

TEST_CASE("construction rejects empty and non-finite input") {
  CHECK_THROWS_AS(SampleSeries({}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSeries({1.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSeries({std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST_CASE("autocov hand values use the n divisor") {
  const SampleSeries s({1, 2, 3});
  CHECK_THAT(mcse::autocov(s, 0), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(mcse::autocov(s, 1), WithinAbs(0.0, 1e-15));
  CHECK_THAT(mcse::autocov(s, 2), WithinAbs(-1.0 / 3.0, 1e-15));
  CHECK_THROWS_AS(mcse::autocov(s, 3), std::domain_error);
}

TEST_CASE("autocov_prefix agrees with autocov") {
  const SampleSeries s({1, 2, 3});
  const auto p = mcse::autocov_prefix(s, 2);
  REQUIRE(p.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(p[k] == mcse::autocov(s, k));

  const auto c = mcse::autocov_prefix(SampleSeries({4, 4, 4, 4}), 3);
  for (const double v : c) CHECK(v == 0.0);

  const SampleSeries one({2, 7, 1});
  CHECK(mcse::autocov_prefix(one, 0) == std::vector<double>{mcse::autocov(one, 0)});
  CHECK_THROWS_AS(mcse::autocov_prefix(one, 3), std::domain_error);
}

TEST_CASE("autocov matches a naive double loop") {
  std::mt19937_64 gen(11);
  for (const std::size_t n : {2u, 7u, 100u, 3001u}) {
    const auto v = random_values(gen, n);
    const SampleSeries s(v);
    const auto p = mcse::autocov_prefix(s, std::min<std::size_t>(n - 1, 40));
    for (std::size_t k = 0; k < p.size(); ++k) CHECK_THAT(p[k], WithinAbs(naive_autocov(v, k), 1e-13));
  }
}

TEST_CASE("autocov properties: shift, scale, Cauchy-Schwarz") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + gen() % 300;
    const auto v = random_values(gen, n);
    const double c = shift(gen);
    std::vector<double> shifted(v), scaled(v);
    for (auto& x : shifted) x += c;
    for (auto& x : scaled) x *= c;
    const SampleSeries s(v), ss(shifted), sc(scaled);
    const double g0 = mcse::autocov(s, 0);
    CHECK(g0 >= 0.0);
    for (std::size_t k = 0; k < std::min<std::size_t>(n, 10); ++k) {
      const double g = mcse::autocov(s, k);
      CHECK(std::abs(g) <= g0 * (1.0 + 1e-12));
      CHECK_THAT(mcse::autocov(ss, k), WithinAbs(g, 1e-11 * (1.0 + std::abs(c))));
      CHECK_THAT(mcse::autocov(sc, k), WithinAbs(c * c * g, 1e-12 * c * c * (1.0 + g0)));
    }
  }
}

TEST_CASE("head keeps a prefix") {
  const SampleSeries s({1, 2, 3, 4});
  const auto h = s.head(2);
  CHECK(h.size() == 2);
  CHECK(h.mean() == 1.5);
}

TEST_CASE("series files: one value per line, or a named CSV column") {
  const auto plain = temp_file("plain.txt", "# comment\n1\n3\n\n2\n6\n");
  const SampleSeries s = mcse::read_series_file(plain);
  CHECK(s.size() == 4);
  CHECK(s.mean() == 3.0);

  const auto csv = temp_file("cols.csv", "a,b\n1,10\n2,20\n3,30\n");
  const SampleSeries b = mcse::read_series_file(csv, "b");
  CHECK(b.size() == 3);
  CHECK(b.mean() == 20.0);
  CHECK_THROWS(mcse::read_series_file(csv, "missing"));

  const auto bad = temp_file("bad.txt", "1\nabc\n");
  CHECK_THROWS(mcse::read_series_file(bad));
  CHECK_THROWS(mcse::read_series_file("/nonexistent/file"));
  std::remove(plain.c_str());
  std::remove(csv.c_str());
  std::remove(bad.c_str());
}
