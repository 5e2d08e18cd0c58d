#include "mcse/estimators.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "accumulate.hpp"

namespace mcse {

namespace {

// Sliding window sums are recomputed from scratch this often.
constexpr std::size_t kSlidingRefresh = std::size_t{1} << 16;

using u128 = unsigned __int128;

// base^exp, or nullopt past 2^126.
std::optional<u128> checked_pow(u128 base, int exp) {
  constexpr u128 kLimit = u128{1} << 126;
  u128 out = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && out > kLimit / base) return std::nullopt;
    out *= base;
  }
  return out;
}

// b^q <= target, with overflow meaning "greater".
bool pow_at_most(std::size_t b, int q, u128 target) {
  const auto p = checked_pow(b, q);
  return p && *p <= target;
}

struct BatchSquares {
  long double sum = 0.0L;
  std::size_t batches = 0;
};

long double window_sum(std::span<const double> y, std::size_t start, std::size_t b) {
  return detail::blocked_sum(y.data() + start, b);
}

// Sum over batch starts j = 0, stride, 2 stride, ... <= n - b of
// (mean of y[j, j+b) - grand)^2.
BatchSquares batch_squares(std::span<const double> y, std::size_t b, std::size_t stride, long double grand) {
  const std::size_t n = y.size();
  const long double lb = static_cast<long double>(b);
  BatchSquares out;
  long double window = window_sum(y, 0, b);
  std::size_t since_refresh = 0;
  std::size_t j = 0;
  while (true) {
    const long double dev = window / lb - grand;
    out.sum += dev * dev;
    ++out.batches;
    const std::size_t next = j + stride;
    if (next > n - b) break;
    if (stride >= b || ++since_refresh == kSlidingRefresh) {
      window = window_sum(y, next, b);
      since_refresh = 0;
    } else {
      for (std::size_t i = 0; i < stride; ++i) {
        window += static_cast<long double>(y[j + b + i]) - static_cast<long double>(y[j + i]);
      }
    }
    j = next;
  }
  return out;
}

// n b / (m (n - b)) * sum, shared by BM, OBM and the partial-overlap form so
// the degenerate strides agree bit for bit.
double normalized_batch_variance(std::span<const double> y, std::size_t b, std::size_t stride) {
  const std::size_t n = y.size();
  const long double grand = detail::blocked_sum(y.data(), n) / static_cast<long double>(n);
  const BatchSquares sq = batch_squares(y, b, stride, grand);
  const long double scale = static_cast<long double>(n) * static_cast<long double>(b);
  const long double denom = static_cast<long double>(sq.batches) * static_cast<long double>(n - b);
  return static_cast<double>(sq.sum * scale / denom);
}

std::string describe(std::size_t n, std::size_t b) {
  return "n = " + std::to_string(n) + ", b = " + std::to_string(b);
}

}  // namespace

Method Method::partial_obm(std::size_t stride) {
  if (stride < 1) throw std::invalid_argument("partial OBM stride must be >= 1");
  return Method(MethodKind::PartialOBM, std::nullopt, stride);
}

Method Method::parse(std::string_view spec, const std::optional<LagWindow>& window) {
  if (spec == "bm") return bm();
  if (spec == "obm") return obm();
  if (spec == "sv") {
    if (!window) throw std::invalid_argument("method 'sv' needs a lag window");
    return sv(*window);
  }
  if (spec.substr(0, 5) == "pobm:") {
    const std::string_view rest = spec.substr(5);
    if (rest.substr(0, 7) != "stride=") throw std::invalid_argument("expected pobm:stride=<k>");
    const std::string text(rest.substr(7));
    std::size_t used = 0;
    unsigned long long k = 0;
    try {
      k = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || k == 0) throw std::invalid_argument("bad pobm stride '" + text + "'");
    return partial_obm(static_cast<std::size_t>(k));
  }
  throw std::invalid_argument("unknown method '" + std::string(spec) + "' (bm|obm|pobm:stride=<k>|sv)");
}

const LagWindow& Method::window() const {
  if (!window_) throw std::logic_error("method " + label() + " has no lag window");
  return *window_;
}

std::string Method::label() const {
  switch (kind_) {
    case MethodKind::BM: return "BM";
    case MethodKind::OBM: return "OBM";
    case MethodKind::PartialOBM: return "pOBM/" + std::to_string(stride_);
    case MethodKind::SV: {
      const auto k = window_->kind();
      if (k == WindowKind::ModifiedBartlett || k == WindowKind::TukeyHanning) return window_->label();
      return "SV[" + window_->spec() + "]";
    }
  }
  return {};
}

BatchPolicy BatchPolicy::fixed(std::size_t b) {
  if (b < 1) throw std::invalid_argument("batch size must be >= 1");
  return BatchPolicy(false, b, 0.0);
}

BatchPolicy BatchPolicy::power_law(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("power-law exponent nu must lie in (0, 1)");
  return BatchPolicy(true, 0, nu);
}

std::size_t floor_power(std::size_t n, double nu) {
  if (n == 0) return 0;
  for (int q = 1; q <= 64; ++q) {
    const double p = std::round(nu * q);
    if (p < 1.0 || std::fabs(nu - p / q) > 1e-12) continue;
    const auto target = checked_pow(n, static_cast<int>(p));
    if (!target) break;
    auto b = static_cast<std::size_t>(std::floor(std::pow(static_cast<long double>(n), p / q)));
    while (b > 0 && !pow_at_most(b, q, *target)) --b;
    while (pow_at_most(b + 1, q, *target)) ++b;
    return b;
  }
  const long double target = nu * std::log(static_cast<long double>(n));
  auto b = static_cast<std::size_t>(std::floor(std::exp(target)));
  while (b > 0 && std::log(static_cast<long double>(b)) > target) --b;
  while (std::log(static_cast<long double>(b + 1)) <= target) ++b;
  return b;
}

std::size_t batch_size(const BatchPolicy& p, std::size_t n) {
  if (n < 1) throw std::domain_error("batch_size: n must be >= 1");
  const std::size_t b = p.is_power_law() ? floor_power(n, p.nu()) : p.fixed_b();
  if (b < 1 || b >= n) {
    throw std::domain_error("batch_size: b = " + std::to_string(b) + " leaves no batch structure for n = " +
                            std::to_string(n));
  }
  return b;
}

VarianceEstimate sv_estimate_from_autocov(std::span<const double> autocovs, std::size_t n, const LagWindow& w,
                                          std::size_t b) {
  if (b < 1 || b > n) throw std::domain_error("sv_estimate: need 1 <= b <= n, " + describe(n, b));
  if (autocovs.size() < b) throw std::invalid_argument("sv_estimate: need autocovariances up to lag b - 1");
  long double tail = 0.0L;
  for (std::size_t s = 1; s < b; ++s) {
    tail += static_cast<long double>(w.value(static_cast<std::int64_t>(s), static_cast<std::int64_t>(b))) *
            autocovs[s];
  }
  VarianceEstimate out;
  out.value = static_cast<double>(static_cast<long double>(autocovs[0]) + 2.0L * tail);
  out.method = Method::sv(w);
  out.b = b;
  out.n = n;
  out.dof = n - b;
  return out;
}

VarianceEstimate sv_estimate(const SampleSeries& s, const LagWindow& w, std::size_t b) {
  if (b < 1 || b > s.size()) throw std::domain_error("sv_estimate: need 1 <= b <= n, " + describe(s.size(), b));
  const auto gammas = autocov_prefix(s, b - 1);
  return sv_estimate_from_autocov(gammas, s.size(), w, b);
}

VarianceEstimate bm_estimate(const SampleSeries& s, std::size_t b) {
  const std::size_t n = s.size();
  if (b < 1) throw std::domain_error("bm_estimate: b must be >= 1");
  const std::size_t a = n / b;
  if (a < 2) throw std::domain_error("bm_estimate: need at least two batches, " + describe(n, b));
  VarianceEstimate out;
  out.value = normalized_batch_variance(s.values().first(a * b), b, b);
  out.method = Method::bm();
  out.b = b;
  out.n = n;
  out.dof = a - 1;
  return out;
}

VarianceEstimate obm_estimate(const SampleSeries& s, std::size_t b) {
  const std::size_t n = s.size();
  if (b < 1 || b >= n) throw std::domain_error("obm_estimate: need 1 <= b < n, " + describe(n, b));
  VarianceEstimate out;
  out.value = normalized_batch_variance(s.values(), b, 1);
  out.method = Method::obm();
  out.b = b;
  out.n = n;
  out.dof = n - b;
  return out;
}

VarianceEstimate partial_obm_estimate(const SampleSeries& s, std::size_t b, std::size_t stride) {
  const std::size_t n = s.size();
  if (b < 1 || b >= n) throw std::domain_error("partial_obm_estimate: need 1 <= b < n, " + describe(n, b));
  if (stride < 1 || stride > b || b % stride != 0) {
    throw std::domain_error("partial_obm_estimate: stride " + std::to_string(stride) + " must divide b = " +
                            std::to_string(b));
  }
  if ((n - b) / stride + 1 < 2) {
    throw std::domain_error("partial_obm_estimate: need at least two batches, " + describe(n, b));
  }
  VarianceEstimate out;
  out.value = normalized_batch_variance(s.values(), b, stride);
  out.method = Method::partial_obm(stride);
  out.b = b;
  out.n = n;
  out.dof = n - b;
  return out;
}

VarianceEstimate estimate(const SampleSeries& s, const Method& m, std::size_t b) {
  switch (m.kind()) {
    case MethodKind::BM: return bm_estimate(s, b);
    case MethodKind::OBM: return obm_estimate(s, b);
    case MethodKind::PartialOBM: return partial_obm_estimate(s, b, m.stride());
    case MethodKind::SV: return sv_estimate(s, m.window(), b);
  }
  throw std::logic_error("estimate: unknown method");
}

double gamma_constant(std::span<const double> autocovs) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < autocovs.size(); ++i) {
    sum += static_cast<long double>(i + 1) * autocovs[i];
  }
  return static_cast<double>(-2.0L * sum);
}

std::size_t optimal_batch(MethodKind method, double gamma, double sigma2, std::size_t n) {
  if (!(sigma2 > 0.0)) throw std::domain_error("optimal_batch: sigma2 must be > 0");
  if (n < 1) throw std::domain_error("optimal_batch: n must be >= 1");
  if (method != MethodKind::BM && method != MethodKind::OBM) {
    throw std::invalid_argument("optimal_batch: defined for BM and OBM only");
  }
  const double constant = method == MethodKind::BM ? 1.0 : 8.0 / 3.0;
  const double raw = std::cbrt(constant * gamma * gamma * static_cast<double>(n) / (sigma2 * sigma2));
  const double upper = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const double clamped = std::min(std::max(std::round(raw), 1.0), upper);
  return static_cast<std::size_t>(clamped);
}

}  // namespace mcse
